//! Percolation PCA toolkit: replica-parallel estimators, scripted
//! experiments, deterministic reporting, and the exact verification suite.
//!
//! The algorithmic core (update kernel, noise field, bounds, oracles) lives
//! in `percpca-core`; this crate adds everything that needs an operating
//! system: thread pools, files, and the command-line interface.

pub mod experiments;
pub mod fit;
pub mod report;
pub mod runconfig;
pub mod simulate;
pub mod verify;
