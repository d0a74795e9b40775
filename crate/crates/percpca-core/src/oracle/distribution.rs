//! Exact distribution evolution via the transfer operator.
//!
//! Given a source configuration, the target sites are conditionally
//! independent: site x becomes 1 with probability p when some neighbour is 1
//! and with probability 0 otherwise. One operator application therefore
//! scatters each source's mass over the subsets of its "alive" mask.

use alloc::vec;
use alloc::vec::Vec;

use crate::neighborhood::{periodic_neighbors, Neighborhood};
use crate::pow_int;
use crate::{Error, Result};

const MAX_RING_SITES: u64 = 16;

/// A probability vector over the `2^(2n)` configurations of the ring,
/// indexed with site `-n` at bit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    n: i64,
    probs: Vec<f64>,
}

impl ExactDistribution {
    /// Point mass on one configuration index.
    pub fn delta(n: i64, index: u64) -> Result<Self> {
        let sites = check_ring_size(n)?;
        let size = 1usize << sites;
        if index as usize >= size {
            return Err(Error::SiteOutOfRange {
                site: index as i64,
                n,
            });
        }
        let mut probs = vec![0.0; size];
        probs[index as usize] = 1.0;
        Ok(Self { n, probs })
    }

    pub fn delta_all_ones(n: i64) -> Result<Self> {
        let sites = check_ring_size(n)?;
        Self::delta(n, (1u64 << sites) - 1)
    }

    pub fn delta_all_zeros(n: i64) -> Result<Self> {
        Self::delta(n, 0)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of(&self, index: u64) -> f64 {
        self.probs[index as usize]
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn check_ring_size(n: i64) -> Result<u32> {
    if n < 1 {
        return Err(Error::ZeroSize { name: "n" });
    }
    let sites = (2 * n) as u64;
    if sites > MAX_RING_SITES {
        return Err(Error::GuardExceeded {
            what: "ring sites 2n",
            got: sites,
            limit: MAX_RING_SITES,
        });
    }
    Ok(sites as u32)
}

/// Applies the transfer operator `t` times.
pub fn exact_evolve(
    dist: &ExactDistribution,
    u: &Neighborhood,
    p: f64,
    t: u32,
) -> Result<ExactDistribution> {
    let sites = check_ring_size(dist.n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    // neighbourhood masks in index-bit space
    let n = dist.n;
    let nb_masks: Vec<u64> = (0..sites)
        .map(|b| {
            let x = b as i64 - n;
            periodic_neighbors(x, n, u)
                .expect("site in range")
                .iter()
                .fold(0u64, |m, &k| m | 1u64 << (k + n))
        })
        .collect();
    let pw_p: Vec<f64> = (0..=sites).map(|k| pow_int(p, k)).collect();
    let pw_q: Vec<f64> = (0..=sites).map(|k| pow_int(1.0 - p, k)).collect();

    let mut cur = dist.probs.clone();
    for _ in 0..t {
        let mut next = vec![0.0; cur.len()];
        for (src, &w) in cur.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut alive = 0u64;
            for (b, &mask) in nb_masks.iter().enumerate() {
                if src as u64 & mask != 0 {
                    alive |= 1u64 << b;
                }
            }
            let ka = alive.count_ones() as usize;
            // all targets are subsets of the alive mask
            let mut sub = alive;
            loop {
                let ones = sub.count_ones() as usize;
                next[sub as usize] += w * pw_p[ones] * pw_q[ka - ones];
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & alive;
            }
        }
        cur = next;
    }
    Ok(ExactDistribution { n, probs: cur })
}

/// `P(tau_n > t)` from all-ones: evolve the point mass and read off the
/// complement of the absorbed weight (all-zeros is absorbing, so its mass at
/// time t is exactly `P(tau_n <= t)`).
pub fn exact_tau_tail(n: i64, u: &Neighborhood, p: f64, t: u32) -> Result<f64> {
    let d0 = ExactDistribution::delta_all_ones(n)?;
    let dt = exact_evolve(&d0, u, p, t)?;
    Ok(1.0 - dt.prob_of(0))
}

/// `E[tau_n]` by tail summation, to additive precision `eps`.
pub fn exact_mean_tau(n: i64, u: &Neighborhood, p: f64, eps: f64, cap: u64) -> Result<f64> {
    let mut dist = ExactDistribution::delta_all_ones(n)?;
    let mut mean = 0.0;
    for _ in 0..cap {
        let tail = 1.0 - dist.prob_of(0);
        if tail < eps {
            return Ok(mean);
        }
        mean += tail;
        dist = exact_evolve(&dist, u, p, 1)?;
    }
    Err(Error::NoConvergence { cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(offsets: &[i64]) -> Neighborhood {
        Neighborhood::new(offsets).unwrap()
    }

    #[test]
    fn all_zeros_is_stationary() {
        let u = nb(&[0, 1]);
        let d = ExactDistribution::delta_all_zeros(2).unwrap();
        for t in [1u32, 3, 7] {
            let e = exact_evolve(&d, &u, 0.8, t).unwrap();
            assert!((e.prob_of(0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_site_one_step_absorption() {
        // n=1, U={0,1}, from all-ones: P(all-zero at t=1) = (1-p)^2
        let u = nb(&[0, 1]);
        for &p in &[0.2, 0.5, 0.8] {
            let tail = exact_tau_tail(1, &u, p, 1).unwrap();
            let want = 1.0 - (1.0 - p) * (1.0 - p);
            assert!((tail - want).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn frozen_tail_values() {
        // independently computed with a separate transfer implementation
        let cases: &[(i64, &[i64], f64, u32, f64)] = &[
            (1, &[0, 1], 0.5, 1, 0.75),
            (2, &[0, 1], 0.5, 1, 0.9375),
            (2, &[0, 1], 0.5, 2, 0.81640625),
            (2, &[0, 1], 0.5, 3, 0.689208984375),
            (2, &[0, 1], 0.3, 2, 0.45643761),
            (1, &[-1, 0, 1], 0.2, 2, 0.1296),
            (2, &[-1, 0, 1], 0.8, 3, 0.994868985856),
        ];
        for &(n, offsets, p, t, want) in cases {
            let got = exact_tau_tail(n, &nb(offsets), p, t).unwrap();
            assert!(
                (got - want).abs() < 1e-12,
                "n={n} {offsets:?} p={p} t={t}: {got}"
            );
        }
    }

    #[test]
    fn mass_is_conserved() {
        let u = nb(&[-1, 0, 1]);
        let d = exact_evolve(&ExactDistribution::delta_all_ones(2).unwrap(), &u, 0.5, 3).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        assert!(d.probs().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn tail_monotone_in_p() {
        let u = nb(&[0, 1]);
        let mut last = 0.0;
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let tail = exact_tau_tail(2, &u, p, 3).unwrap();
            assert!(tail >= last - 1e-12, "p={p}");
            last = tail;
        }
    }

    #[test]
    fn frozen_mean_tau() {
        let u = nb(&[0, 1]);
        let m = exact_mean_tau(2, &u, 0.5, 1e-13, 100_000).unwrap();
        assert!((m - 6.736842105262).abs() < 1e-9, "{m}");
        let m1 = exact_mean_tau(1, &u, 0.5, 1e-13, 100_000).unwrap();
        assert!((m1 - 4.0).abs() < 1e-9, "{m1}");
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            ExactDistribution::delta_all_ones(9),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
