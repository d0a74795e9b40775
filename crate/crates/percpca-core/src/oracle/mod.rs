//! Exact small-instance oracles.
//!
//! Two independent derivations of the same measure anchor the whole artifact:
//! the transfer-operator evolution of the full distribution over ring
//! configurations, and the exhaustive enumeration of noise fields pushed
//! through the deterministic update map. They must agree to 1e-12 wherever
//! both are computable. On top of these: open-path reachability (the
//! percolation correspondence), exact massif-edge displacement tails, the
//! cylinder-vs-line connection inequality, and the coupled neighbourhood
//! domination check.
//!
//! Enumeration guards are hard errors, never silent truncations.

mod compare;
mod displacement;
mod distribution;
mod enumerate;
mod reach;

pub use compare::{coupled_domination, cylinder_vs_line, CylinderVsLine};
pub use displacement::{exact_one_step_displacement, exact_two_step_displacement, Direction};
pub use distribution::{exact_evolve, exact_mean_tau, exact_tau_tail, ExactDistribution};
pub use enumerate::enumerate_omega_tau_tail;
pub use reach::{reachability_ring, ReachabilitySet};
