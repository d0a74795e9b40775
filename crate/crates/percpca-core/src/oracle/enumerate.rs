//! Exhaustive noise-field enumeration.
//!
//! The second, independent route to `P(tau_n > t)`: push every noise field of
//! the `2n x t` box through the deterministic update map and accumulate the
//! survivors' Bernoulli weights. Survivor counts are gathered in an integer
//! histogram by number of open bits, which keeps the reduction exact and
//! order-independent and lets one enumeration serve every p.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::RingConfig;
use crate::neighborhood::Neighborhood;
use crate::pow_int;
use crate::update::step_ring_masked;
use crate::{Error, Result};

const MAX_OMEGA_BITS: u64 = 24;

/// Survivor histogram: `hist[k]` counts noise fields with `k` open bits whose
/// trajectory from all-ones is not absorbed by time `t`.
pub(crate) fn survivor_histogram(n: i64, u: &Neighborhood, t: u32) -> Result<Vec<u64>> {
    if n < 1 {
        return Err(Error::ZeroSize { name: "n" });
    }
    if t < 1 {
        return Err(Error::ZeroSize { name: "t" });
    }
    let sites = (2 * n) as u32;
    let bits = sites as u64 * t as u64;
    if bits > MAX_OMEGA_BITS {
        return Err(Error::GuardExceeded {
            what: "noise bits 2n*t",
            got: bits,
            limit: MAX_OMEGA_BITS,
        });
    }
    let row_mask = (1u64 << sites) - 1;
    let mut hist = vec![0u64; bits as usize + 1];
    for omega in 0..(1u64 << bits) {
        let mut cfg = RingConfig::all_ones(n);
        let mut alive = true;
        for r in 0..t {
            let mask = (omega >> (r * sites)) & row_mask;
            cfg = step_ring_masked(&cfg, u, &[mask]);
            if cfg.is_all_zero() {
                alive = false;
                break;
            }
        }
        if alive {
            hist[omega.count_ones() as usize] += 1;
        }
    }
    Ok(hist)
}

/// `P(tau_n > t)` by summing `P_p(omega) * [tau_n(omega, all-ones) > t]`
/// over every noise field of the box.
pub fn enumerate_omega_tau_tail(n: i64, u: &Neighborhood, p: f64, t: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let hist = survivor_histogram(n, u, t)?;
    let bits = (hist.len() - 1) as u32;
    let mut total = 0.0;
    for (k, &count) in hist.iter().enumerate() {
        if count > 0 {
            total += count as f64 * pow_int(p, k as u32) * pow_int(1.0 - p, bits - k as u32);
        }
    }
    Ok(total)
}
