//! Percolation PCA: a one-dimensional probabilistic cellular automaton with an
//! absorbing all-zeros state.
//!
//! A site becomes 1 with probability `p` unless every site of its
//! neighbourhood was 0, in which case it becomes 0. Equivalently, with a
//! Bernoulli(p) noise bit `w(x,t)` per space-time vertex, the update map is
//!
//! ```text
//! eta[x, t+1] = min( w(x,t), max{ eta[k, t] : k in U(x) } )
//! ```
//!
//! which ties the process to oriented site percolation: a site is 1 at time t
//! iff an open path joins it to a 1 of the initial realisation.
//!
//! This crate is the computational core: configurations packed into machine
//! words, a counter-based noise field (any sub-box regenerates identically, so
//! parallel replicas need no shared stream), zero-massif edge tracking, the
//! analytic lower bounds on the critical probability, and exact
//! small-instance oracles used to cross-validate everything else.
//!
//! `no_std` compatible (requires `alloc`); the `std` feature (default) only
//! marks the standard environment, no API differences.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

mod bits;
pub mod bounds;
pub mod config;
mod error;
pub mod massif;
pub mod neighborhood;
pub mod noise;
pub mod oracle;
pub mod sim;
pub mod update;

pub use config::{LineConfig, RingConfig};
pub use error::{Error, Result};
pub use massif::{track_massif, MassifTrack};
pub use neighborhood::{periodic_neighbors, Neighborhood};
pub use noise::{hash64, replica_seed, NoiseField};
pub use update::{step_line, step_ring};

/// Integer power of a float, usable without `std`.
pub(crate) fn pow_int(x: f64, mut k: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}
