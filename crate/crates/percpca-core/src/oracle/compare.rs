//! Cylinder-vs-line connection probabilities and coupled neighbourhood
//! domination.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::RingConfig;
use crate::neighborhood::{periodic_neighbors, Neighborhood};
use crate::noise::{replica_seed, NoiseField};
use crate::pow_int;
use crate::update::step_ring;
use crate::{Error, Result};

const MAX_OMEGA_BITS: u64 = 24;

/// Exact connection probabilities of `(0, t)` to the base line from
/// all-ones, on the periodic ring and on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderVsLine {
    pub p_cylinder: f64,
    pub p_line: f64,
    /// `p_cylinder <= p_line + 1e-12`: wrapping the strip into a cylinder
    /// synchronizes columns and cannot increase the connection probability.
    pub holds: bool,
}

/// Computes both probabilities by exhaustive noise enumeration and checks
/// the inequality.
pub fn cylinder_vs_line(n: i64, t: u32, u: &Neighborhood, p: f64) -> Result<CylinderVsLine> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    if t == 0 {
        return Ok(CylinderVsLine {
            p_cylinder: 1.0,
            p_line: 1.0,
            holds: true,
        });
    }
    let cyl_hist = cylinder_connection_histogram(n, t, u)?;
    let (line_bits, line_hist) = line_connection_histogram(t, u)?;
    let p_cylinder = weighted_fraction(&cyl_hist, p);
    let p_line = weighted_fraction(&line_hist, p);
    debug_assert_eq!(line_hist.len(), line_bits + 1);
    Ok(CylinderVsLine {
        p_cylinder,
        p_line,
        holds: p_cylinder <= p_line + 1e-12,
    })
}

fn weighted_fraction(hist: &[u64], p: f64) -> f64 {
    let bits = (hist.len() - 1) as u32;
    hist.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| c as f64 * pow_int(p, k as u32) * pow_int(1.0 - p, bits - k as u32))
        .sum()
}

/// Histogram over noise fields of the `2n x t` periodic box: `hist[k]`
/// counts fields with `k` open bits for which `(0, t)` connects to the base
/// line (all-ones initial state).
fn cylinder_connection_histogram(n: i64, t: u32, u: &Neighborhood) -> Result<Vec<u64>> {
    if n < 1 {
        return Err(Error::ZeroSize { name: "n" });
    }
    let sites = (2 * n) as usize;
    let bits = sites as u64 * t as u64;
    if bits > MAX_OMEGA_BITS {
        return Err(Error::GuardExceeded {
            what: "cylinder noise bits 2n*t",
            got: bits,
            limit: MAX_OMEGA_BITS,
        });
    }
    let nbrs: Vec<Vec<usize>> = (-n..n)
        .map(|x| {
            Ok(periodic_neighbors(x, n, u)?
                .into_iter()
                .map(|k| (k + n) as usize)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut hist = vec![0u64; bits as usize + 1];
    let mut prev = vec![true; sites];
    let mut cur = vec![false; sites];
    for omega in 0..(1u64 << bits) {
        prev.iter_mut().for_each(|b| *b = true);
        for r in 1..=t {
            for (i, slot) in cur.iter_mut().enumerate() {
                let open = (omega >> ((r - 1) as usize * sites + i)) & 1 == 1;
                *slot = open && nbrs[i].iter().any(|&k| prev[k]);
            }
            core::mem::swap(&mut prev, &mut cur);
        }
        if prev[n as usize] {
            hist[omega.count_ones() as usize] += 1;
        }
    }
    Ok(hist)
}

/// Histogram over the noise bits of the evolution cone of `(0, t)` on the
/// line; all paths of length `t` stay within `[[s_1 t, s_u t]]`, so only the
/// cone's bits matter.
fn line_connection_histogram(t: u32, u: &Neighborhood) -> Result<(usize, Vec<u64>)> {
    let span = u.span();
    let ti = t as i64;
    // level r needs positions [[(t-r) s_1, (t-r) s_u]]; rows r = 1..=t carry
    // noise bits
    let row_len = |r: u32| ((ti - r as i64) * span + 1) as usize;
    let bits: usize = (1..=t).map(row_len).sum();
    if bits as u64 > MAX_OMEGA_BITS {
        return Err(Error::GuardExceeded {
            what: "line cone noise bits",
            got: bits as u64,
            limit: MAX_OMEGA_BITS,
        });
    }
    let mut offsets = Vec::with_capacity(t as usize + 1);
    let mut acc = 0usize;
    offsets.push(0); // unused row 0
    for r in 1..=t {
        offsets.push(acc);
        acc += row_len(r);
    }
    let mut hist = vec![0u64; bits + 1];
    for omega in 0..(1u64 << bits) {
        // level 0: all-ones initial, everything connected
        let mut prev = vec![true; (ti * span + 1) as usize];
        for r in 1..=t {
            let lo = (ti - r as i64) * u.min();
            let prev_lo = (ti - r as i64 + 1) * u.min();
            let len = row_len(r);
            let mut cur = vec![false; len];
            for (i, slot) in cur.iter_mut().enumerate() {
                let z = lo + i as i64;
                let open = (omega >> (offsets[r as usize] + i)) & 1 == 1;
                *slot = open
                    && u.offsets()
                        .iter()
                        .any(|&s| prev[(z + s - prev_lo) as usize]);
            }
            prev = cur;
        }
        if prev[0] {
            hist[omega.count_ones() as usize] += 1;
        }
    }
    Ok((bits, hist))
}

/// Runs the PCAs of nested neighbourhoods `U subset U'` on the same noise
/// field from all-ones and reports whether the U-trajectory stays pointwise
/// below the U'-trajectory at every site, time, and replica.
pub fn coupled_domination(
    u: &Neighborhood,
    u_prime: &Neighborhood,
    n: i64,
    p: f64,
    t_horizon: u32,
    replicas: u64,
    master_seed: u64,
) -> Result<bool> {
    if !u.is_subset_of(u_prime) {
        return Err(Error::NotNested);
    }
    if n < 1 {
        return Err(Error::ZeroSize { name: "n" });
    }
    for r in 0..replicas {
        let noise = NoiseField::new(replica_seed(master_seed, r), p)?;
        let mut small = RingConfig::all_ones(n);
        let mut big = RingConfig::all_ones(n);
        for t in 0..t_horizon {
            small = step_ring(&small, u, &noise, t as i64);
            big = step_ring(&big, u_prime, &noise, t as i64);
            if !small.dominated_by(&big) {
                return Ok(false);
            }
            if big.is_all_zero() {
                break; // both absorbed (small is dominated)
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_tau_tail;

    fn nb(offsets: &[i64]) -> Neighborhood {
        Neighborhood::new(offsets).unwrap()
    }

    #[test]
    fn extremes_are_equal() {
        let u = nb(&[0, 1]);
        let r = cylinder_vs_line(2, 2, &u, 1.0).unwrap();
        assert!((r.p_cylinder - 1.0).abs() < 1e-12);
        assert!((r.p_line - 1.0).abs() < 1e-12);
        assert!(r.holds);
        let r0 = cylinder_vs_line(2, 0, &u, 0.37).unwrap();
        assert_eq!((r0.p_cylinder, r0.p_line), (1.0, 1.0));
    }

    #[test]
    fn cylinder_probability_matches_transfer_operator() {
        // P((0,t) -> base) on the ring equals P(eta_0^t = 1) from all-ones,
        // which the exact distribution gives by summing odd-origin states
        let u = nb(&[0, 1]);
        let (n, t, p) = (2i64, 3u32, 0.45);
        let r = cylinder_vs_line(n, t, &u, p).unwrap();
        let d = crate::oracle::exact_evolve(
            &crate::oracle::ExactDistribution::delta_all_ones(n).unwrap(),
            &u,
            p,
            t,
        )
        .unwrap();
        let origin_bit = 1u64 << n; // site 0 at bit n
        let want: f64 = d
            .probs()
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx as u64 & origin_bit != 0)
            .map(|(_, &w)| w)
            .sum();
        assert!(
            (r.p_cylinder - want).abs() < 1e-12,
            "{} vs {want}",
            r.p_cylinder
        );
    }

    #[test]
    fn line_probability_for_two_sites_one_step() {
        // t=1: P = p for any U (only the top vertex's bit matters)
        let u = nb(&[-1, 0, 1]);
        let r = cylinder_vs_line(2, 1, &u, 0.3).unwrap();
        assert!((r.p_line - 0.3).abs() < 1e-12);
        assert!((r.p_cylinder - 0.3).abs() < 1e-12);
    }

    #[test]
    fn inequality_holds_on_guarded_instances() {
        let u = nb(&[0, 1]);
        for n in [2i64, 3] {
            for t in [2u32, 3] {
                for &p in &[0.3, 0.5, 0.7] {
                    let r = cylinder_vs_line(n, t, &u, p).unwrap();
                    assert!(r.holds, "n={n} t={t} p={p}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn line_dominates_visibly_on_small_ring() {
        // n=1 wraps hard: the gap is strictly positive at moderate p
        let u = nb(&[-1, 0, 1]);
        let r = cylinder_vs_line(1, 3, &u, 0.5).unwrap();
        assert!(r.holds);
        assert!(r.p_line > r.p_cylinder);
    }

    #[test]
    fn cylinder_tail_union_consistency() {
        // sanity: P(origin connected) <= P(tau > t)
        let u = nb(&[0, 1]);
        let r = cylinder_vs_line(2, 2, &u, 0.4).unwrap();
        let tail = exact_tau_tail(2, &u, 0.4, 2).unwrap();
        assert!(r.p_cylinder <= tail + 1e-12);
    }

    #[test]
    fn domination_reflexive_and_nested() {
        let u = nb(&[0, 1]);
        let u3 = nb(&[-1, 0, 1]);
        assert!(coupled_domination(&u, &u, 8, 0.6, 32, 64, 5).unwrap());
        assert!(coupled_domination(&u, &u3, 8, 0.6, 32, 64, 5).unwrap());
        let single = nb(&[0]);
        assert!(coupled_domination(&single, &u, 8, 0.6, 32, 64, 5).unwrap());
    }

    #[test]
    fn non_nested_rejected() {
        let a = nb(&[-1, 0]);
        let b = nb(&[0, 1]);
        assert_eq!(
            coupled_domination(&a, &b, 4, 0.5, 8, 4, 1),
            Err(Error::NotNested)
        );
    }
}
