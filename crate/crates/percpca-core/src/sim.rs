//! Single-replica simulation primitives.
//!
//! Each function here consumes one derived seed and is a pure function of its
//! arguments; replica-level parallelism and aggregation live downstream.

use crate::config::{LineConfig, RingConfig};
use crate::neighborhood::Neighborhood;
use crate::noise::NoiseField;
use crate::update::step_line;
use crate::{Error, Result};

// noise addressing packs the time into 32 bits
const MAX_TIME: u64 = u32::MAX as u64;

fn check_horizon(name: &'static str, t: u64) -> Result<()> {
    if t > MAX_TIME {
        return Err(Error::Domain {
            name,
            value: t as f64,
            range: "[1, 2^32)",
        });
    }
    Ok(())
}

/// Outcome of one absorption run on the ring from the all-ones realisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsorptionRecord {
    /// First time every site of `[[-n, n-1]]` is zero; `None` when censored
    /// at `t_max`.
    pub tau: Option<u64>,
    pub t_max: u64,
    pub replica_seed: u64,
}

/// Runs the ring from all-ones until absorption or the cap.
pub fn run_until_absorbed(
    n: i64,
    u: &Neighborhood,
    p: f64,
    seed: u64,
    t_max: u64,
) -> Result<AbsorptionRecord> {
    if n < 1 {
        return Err(Error::ZeroSize { name: "n" });
    }
    if t_max < 1 {
        return Err(Error::ZeroSize { name: "t_max" });
    }
    check_horizon("t_max", t_max)?;
    let noise = NoiseField::new(seed, p)?;
    let mut cur = RingConfig::all_ones(n);
    let mut next = cur.clone();
    for t in 1..=t_max {
        crate::update::step_ring_buffers(&cur, &mut next.words, u, |w| {
            noise.ring_mask_word(n, w, (t - 1) as i64)
        });
        core::mem::swap(&mut cur, &mut next);
        if cur.is_all_zero() {
            return Ok(AbsorptionRecord {
                tau: Some(t),
                t_max,
                replica_seed: seed,
            });
        }
    }
    Ok(AbsorptionRecord {
        tau: None,
        t_max,
        replica_seed: seed,
    })
}

/// State of the origin at time `t_end` on the ring from all-ones.
pub fn origin_state_at(n: i64, u: &Neighborhood, p: f64, seed: u64, t_end: u64) -> Result<bool> {
    if n < 1 {
        return Err(Error::ZeroSize { name: "n" });
    }
    check_horizon("t_end", t_end)?;
    let noise = NoiseField::new(seed, p)?;
    let mut cur = RingConfig::all_ones(n);
    let mut next = cur.clone();
    for t in 0..t_end {
        crate::update::step_ring_buffers(&cur, &mut next.words, u, |w| {
            noise.ring_mask_word(n, w, t as i64)
        });
        core::mem::swap(&mut cur, &mut next);
        if cur.is_all_zero() {
            return Ok(false);
        }
    }
    cur.get(0)
}

/// Whether the cluster grown from a single 1 at the origin is still alive
/// (configuration not all-zero) after `m` steps on the line.
pub fn cluster_survives(u: &Neighborhood, p: f64, m: u64, seed: u64) -> Result<bool> {
    if m < 1 {
        return Err(Error::ZeroSize { name: "m" });
    }
    check_horizon("m", m)?;
    let mi = m as i64;
    // sites occupied at time t lie in [[-t s_u, -t s_1]] (the update pulls
    // from x + U); the trusted window edges move by (s_1, s_u) per step, so
    // [[-m span, m span]] at t=0 keeps the whole cluster visible through m
    let lo0 = -mi * u.span() - 2;
    let hi0 = mi * u.span() + 2;
    let noise = NoiseField::new(seed, p)?;
    let mut cfg = LineConfig::from_fn(lo0, hi0, false, |x| x == 0);
    for t in 0..m {
        cfg = step_line(&cfg, u, &noise, t as i64)?;
        if cfg.is_all_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rightmost reachable site after `m` steps from the half-infinite source
/// set `{x <= 0}` (truncated to a finite window).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrontOutcome {
    pub position: i64,
    /// The window went empty: every truncated-source descendant died, so the
    /// true front lies at or below `position` (the window floor).
    pub clamped: bool,
}

/// Simulates the PCA with neighbourhood `v` from the occupancy `1_{x <= 0}`
/// and reports the rightmost occupied site at time `m`.
///
/// With `v = -U` this is the right edge `r̄_m` of the set reachable from the
/// half-line in the oriented graph of `U`; negating the outcome for `v = U`
/// gives the left edge `l̄_m`. Exact whenever the front stays above the
/// window floor `-(span*m + pad)`; otherwise clamped there and flagged.
pub fn front_max(v: &Neighborhood, p: f64, m: u64, seed: u64, pad: i64) -> Result<FrontOutcome> {
    if m < 1 {
        return Err(Error::ZeroSize { name: "m" });
    }
    check_horizon("m", m)?;
    let mi = m as i64;
    let lo_final = -(v.span() * mi + pad);
    let hi_final = -v.min() * mi + pad;
    // window edges move by (v.min, v.max) per step
    let lo0 = lo_final + mi * v.min();
    let hi0 = hi_final + mi * v.max();
    let noise = NoiseField::new(seed, p)?;
    let mut cfg = LineConfig::from_fn(lo0, hi0, false, |x| x <= 0);
    for t in 0..m {
        cfg = step_line(&cfg, v, &noise, t as i64)?;
        if cfg.is_all_zero() {
            return Ok(FrontOutcome {
                position: lo_final,
                clamped: true,
            });
        }
    }
    let position = cfg.max_one().expect("nonempty checked above");
    Ok(FrontOutcome {
        position,
        clamped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(offsets: &[i64]) -> Neighborhood {
        Neighborhood::new(offsets).unwrap()
    }

    #[test]
    fn p_zero_absorbs_in_one_step() {
        let u = nb(&[0, 1]);
        for n in [1i64, 3, 20] {
            let rec = run_until_absorbed(n, &u, 0.0, 7, 100).unwrap();
            assert_eq!(rec.tau, Some(1));
        }
    }

    #[test]
    fn p_one_censors() {
        let u = nb(&[0, 1]);
        let rec = run_until_absorbed(4, &u, 1.0, 7, 500).unwrap();
        assert_eq!(rec.tau, None);
        assert_eq!(rec.t_max, 500);
    }

    #[test]
    fn one_step_survival_rate_two_sites() {
        // n=1, U={0,1}: P(tau > 1) = 1 - (1-p)^2 from all-ones
        let u = nb(&[0, 1]);
        let p = 0.6;
        let reps = 20_000u64;
        let mut beyond_one = 0u64;
        for r in 0..reps {
            let seed = crate::noise::replica_seed(99, r);
            let rec = run_until_absorbed(1, &u, p, seed, 50).unwrap();
            if rec.tau != Some(1) {
                beyond_one += 1;
            }
        }
        let want = 1.0 - (1.0 - p) * (1.0 - p);
        let got = beyond_one as f64 / reps as f64;
        let sigma = (want * (1.0 - want) / reps as f64).sqrt();
        assert!((got - want).abs() < 3.0 * sigma, "got {got} want {want}");
    }

    #[test]
    fn determinism_same_seed() {
        let u = nb(&[-1, 0, 1]);
        let a = run_until_absorbed(8, &u, 0.45, 1234, 10_000).unwrap();
        let b = run_until_absorbed(8, &u, 0.45, 1234, 10_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn origin_survival_extremes() {
        let u = nb(&[0, 1]);
        assert!(cluster_survives(&u, 1.0, 10, 5).unwrap());
        assert!(!cluster_survives(&u, 0.0, 1, 5).unwrap());
    }

    fn survival_rate(u: &Neighborhood, p: f64, m: u64, reps: u64, master: u64) -> f64 {
        let mut hits = 0u64;
        for r in 0..reps {
            if cluster_survives(u, p, m, crate::noise::replica_seed(master, r)).unwrap() {
                hits += 1;
            }
        }
        hits as f64 / reps as f64
    }

    #[test]
    fn cluster_survival_one_step_closed_form() {
        // alive at time 1 iff some site of -U has an open bit:
        // P = 1 - (1-p)^u
        for offsets in [&[0i64, 1][..], &[-1, 0, 1], &[-1, 0, 2]] {
            let u = nb(offsets);
            let p = 0.6;
            let reps = 20_000;
            let want = 1.0 - crate::pow_int(1.0 - p, u.len() as u32);
            let got = survival_rate(&u, p, 1, reps, 301);
            let sigma = (want * (1.0 - want) / reps as f64).sqrt();
            assert!(
                (got - want).abs() < 3.0 * sigma,
                "{offsets:?}: {got} vs {want}"
            );
        }
    }

    /// Exhaustive reference for P(cluster from the origin alive at time 2):
    /// row 0 matters on [[-s_u, -s_1]], row 1 on [[-2 s_u, -2 s_1]].
    fn brute_two_step_survival(u: &Neighborhood, p: f64) -> f64 {
        let (s1, su) = (u.min(), u.max());
        let row0: alloc::vec::Vec<i64> = (-su..=-s1).collect();
        let row1: alloc::vec::Vec<i64> = (-2 * su..=-2 * s1).collect();
        let bits = row0.len() + row1.len();
        let mut total = 0.0;
        for omega in 0u64..(1 << bits) {
            let open = |idx: usize| (omega >> idx) & 1 == 1;
            let eta1: alloc::vec::Vec<(i64, bool)> = row0
                .iter()
                .enumerate()
                .map(|(i, &x)| (x, open(i) && u.offsets().iter().any(|&s| x + s == 0)))
                .collect();
            let alive2 = row1.iter().enumerate().any(|(i, &x)| {
                open(row0.len() + i)
                    && u.offsets()
                        .iter()
                        .any(|&s| eta1.iter().any(|&(y, v)| v && y == x + s))
            });
            if alive2 {
                let ones = omega.count_ones();
                total += crate::pow_int(p, ones) * crate::pow_int(1.0 - p, bits as u32 - ones);
            }
        }
        total
    }

    #[test]
    fn cluster_survival_two_steps_matches_enumeration() {
        for offsets in [&[0i64, 1][..], &[-1, 0, 1]] {
            let u = nb(offsets);
            for &p in &[0.3, 0.7, 0.9] {
                let want = brute_two_step_survival(&u, p);
                let reps = 20_000;
                let got = survival_rate(&u, p, 2, reps, 555);
                let sigma = (want * (1.0 - want) / reps as f64).sqrt();
                assert!(
                    (got - want).abs() < 3.5 * sigma,
                    "{offsets:?} p={p}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn cluster_survival_plateaus_when_supercritical() {
        // above the critical point survival stays bounded away from zero
        let u = nb(&[0, 1]);
        let deep = survival_rate(&u, 0.9, 60, 2000, 777);
        assert!(deep > 0.5, "supercritical survival at depth 60: {deep}");
    }

    #[test]
    fn front_speed_p_one() {
        // all paths open: the (-U)-front moves at s_u, the U-front at -s_1
        for offsets in [&[0i64, 1][..], &[-1, 0, 1], &[-1, 0, 2]] {
            let u = nb(offsets);
            let m = 17;
            let right = front_max(&u.reflected(), 1.0, m, 3, 32).unwrap();
            assert!(!right.clamped);
            assert_eq!(right.position, u.max() * m as i64);
            let left = front_max(&u, 1.0, m, 4, 32).unwrap();
            assert!(!left.clamped);
            assert_eq!(-left.position, u.min() * m as i64);
        }
    }

    #[test]
    fn horizon_guard() {
        let u = nb(&[0, 1]);
        assert!(matches!(
            run_until_absorbed(2, &u, 0.5, 1, 1 << 33),
            Err(Error::Domain { name: "t_max", .. })
        ));
        assert!(matches!(
            cluster_survives(&u, 0.5, 1 << 33, 1),
            Err(Error::Domain { name: "m", .. })
        ));
    }

    #[test]
    fn front_clamps_when_everything_dies() {
        let u = nb(&[0, 1]);
        let out = front_max(&u.reflected(), 0.0, 5, 3, 8).unwrap();
        assert!(out.clamped);
        assert_eq!(out.position, -(u.span() * 5 + 8));
    }
}
