//! The synchronous update kernel.
//!
//! One step sends `eta` to `min(w(x,t), max_{k in U(x)} eta_k)`: a site is 1
//! iff its noise bit is open and some neighbour was 1. Word-wise this is an
//! OR of shifted copies of the configuration (one shift per offset, ring wrap
//! handled by end-word stitching) ANDed with the noise mask row.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits;
use crate::config::{LineConfig, RingConfig};
use crate::neighborhood::Neighborhood;
use crate::noise::NoiseField;
use crate::{Error, Result};

/// One synchronous step on the ring, driven by noise row `t`.
pub fn step_ring(cfg: &RingConfig, u: &Neighborhood, noise: &NoiseField, t: i64) -> RingConfig {
    step_ring_with(cfg, u, |word| noise.ring_mask_word(cfg.n(), word, t))
}

/// One synchronous step on the ring with an explicit mask row (bit `b` of the
/// row is the noise at site `b - n`). Used by the exhaustive noise-field
/// enumerations.
pub fn step_ring_masked(cfg: &RingConfig, u: &Neighborhood, mask: &[u64]) -> RingConfig {
    step_ring_with(cfg, u, |word| mask[word])
}

fn step_ring_with(
    cfg: &RingConfig,
    u: &Neighborhood,
    mask_word: impl Fn(usize) -> u64,
) -> RingConfig {
    let mut new = cfg.clone();
    step_ring_buffers(cfg, &mut new.words, u, mask_word);
    new
}

/// In-place variant for hot loops: writes the next configuration into `out`.
pub(crate) fn step_ring_buffers(
    cfg: &RingConfig,
    out: &mut [u64],
    u: &Neighborhood,
    mask_word: impl Fn(usize) -> u64,
) {
    let len = cfg.site_count();
    for (w, slot) in out.iter_mut().enumerate() {
        let base = (w * 64) as i64;
        let mut acc = 0u64;
        for &s in u.offsets() {
            let start = (base + s).rem_euclid(len as i64) as usize;
            acc |= bits::extract64_ring(&cfg.words, len, start);
        }
        *slot = acc & mask_word(w);
    }
    if let Some(last) = out.last_mut() {
        *last &= bits::tail_mask(len);
    }
}

/// One synchronous step on a line window, driven by noise row `t`.
///
/// The result lives on the shrunken window `[[lo - s_1, hi - s_u]]` of sites
/// whose new state is exact no matter what lies outside the old window;
/// an exhausted window is a cone violation.
pub fn step_line(
    cfg: &LineConfig,
    u: &Neighborhood,
    noise: &NoiseField,
    t: i64,
) -> Result<LineConfig> {
    let (lo, hi) = cfg.window();
    let new_lo = lo - u.min();
    let new_hi = hi - u.max();
    if new_lo > new_hi {
        return Err(Error::ConeViolation { lo, hi });
    }
    let old_len = cfg.len();
    let new_len = (new_hi - new_lo + 1) as usize;
    let mut out: Vec<u64> = vec![0u64; bits::word_count(new_len)];
    for (w, slot) in out.iter_mut().enumerate() {
        let base = new_lo + (w * 64) as i64;
        let mut acc = 0u64;
        for &s in u.offsets() {
            acc |= bits::extract64_line(&cfg.words, old_len, base + s - lo);
        }
        *slot = acc & noise.line_mask_word(new_lo, new_len, w, t);
    }
    if let Some(last) = out.last_mut() {
        *last &= bits::tail_mask(new_len);
    }
    Ok(LineConfig::raw(new_lo, new_hi, cfg.outside_value(), out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(offsets: &[i64]) -> Neighborhood {
        Neighborhood::new(offsets).unwrap()
    }

    /// Reference implementation: per-site min/max form of the update map.
    fn step_ring_naive(
        cfg: &RingConfig,
        u: &Neighborhood,
        noise: &NoiseField,
        t: i64,
    ) -> RingConfig {
        let n = cfg.n();
        let mut out = RingConfig::all_zeros(n);
        for x in -n..n {
            let any = crate::neighborhood::periodic_neighbors(x, n, u)
                .unwrap()
                .iter()
                .any(|&k| cfg.get(k).unwrap());
            out.set(x, any && noise.open(x, t)).unwrap();
        }
        out
    }

    #[test]
    fn word_kernel_matches_naive() {
        for &n in &[1i64, 2, 3, 5, 33, 64, 70] {
            for offsets in [&[0i64, 1][..], &[-1, 0, 1], &[-2, 1], &[0], &[-1, 0, 1, 2]] {
                let u = nb(offsets);
                let noise = NoiseField::new(1234 + n as u64, 0.55).unwrap();
                let mut cfg = RingConfig::all_ones(n);
                // also exercise a sparse configuration
                for x in -n..n {
                    if (x * 3 + n) % 5 == 0 {
                        cfg.set(x, false).unwrap();
                    }
                }
                for t in 0..4 {
                    let fast = step_ring(&cfg, &u, &noise, t);
                    let slow = step_ring_naive(&cfg, &u, &noise, t);
                    assert_eq!(fast, slow, "n={n} U={u} t={t}");
                    cfg = fast;
                }
            }
        }
    }

    #[test]
    fn all_zeros_is_absorbing() {
        let u = nb(&[-1, 0, 1]);
        let cfg = RingConfig::all_zeros(5);
        let noise = NoiseField::new(9, 1.0).unwrap();
        assert!(step_ring(&cfg, &u, &noise, 0).is_all_zero());
    }

    #[test]
    fn all_ones_fixed_at_p_one() {
        let u = nb(&[0, 1]);
        let cfg = RingConfig::all_ones(4);
        let noise = NoiseField::new(9, 1.0).unwrap();
        assert_eq!(step_ring(&cfg, &u, &noise, 0), cfg);
    }

    #[test]
    fn two_site_ring_hand_applied() {
        // ring n=1, U={0,1}, config (1,0), open noise everywhere -> (1,1)
        let u = nb(&[0, 1]);
        let mut cfg = RingConfig::all_zeros(1);
        cfg.set(-1, true).unwrap();
        let noise = NoiseField::new(0, 1.0).unwrap();
        let out = step_ring(&cfg, &u, &noise, 0);
        assert!(out.get(-1).unwrap());
        assert!(out.get(0).unwrap());
    }

    #[test]
    fn line_step_matches_ring_interior() {
        // far from any boundary the line and a large ring agree site by site
        let u = nb(&[-1, 0, 2]);
        let noise = NoiseField::new(77, 0.6).unwrap();
        let n = 200i64;
        let mut ring = RingConfig::all_zeros(n);
        let line = LineConfig::from_fn(-40, 40, false, |x| x.rem_euclid(3) == 0);
        for x in -40..=40 {
            ring.set(x, x.rem_euclid(3) == 0).unwrap();
        }
        let line2 = step_line(&line, &u, &noise, 0).unwrap();
        let ring2 = step_ring(&ring, &u, &noise, 0);
        let (lo, hi) = line2.window();
        assert_eq!((lo, hi), (-39, 38));
        for x in lo..=hi {
            assert_eq!(line2.get(x).unwrap(), ring2.get(x).unwrap(), "site {x}");
        }
    }

    #[test]
    fn line_window_exhaustion_is_cone_violation() {
        let u = nb(&[-3, 3]);
        let line = LineConfig::from_fn(0, 4, false, |_| true);
        let noise = NoiseField::new(1, 0.5).unwrap();
        assert!(matches!(
            step_line(&line, &u, &noise, 0),
            Err(Error::ConeViolation { .. })
        ));
    }

    #[test]
    fn monotone_coupling_on_random_pairs() {
        // eta <= eta' pointwise implies step(eta) <= step(eta') for the same noise
        let u = nb(&[-1, 0, 1, 3]);
        let n = 37i64;
        for seed in 0..40u64 {
            let noise = NoiseField::new(seed, 0.5).unwrap();
            let picks = NoiseField::new(seed ^ 0xAAAA, 0.45).unwrap();
            let extra = NoiseField::new(seed ^ 0x5555, 0.3).unwrap();
            let mut small = RingConfig::all_zeros(n);
            let mut big = RingConfig::all_zeros(n);
            for x in -n..n {
                let lo = picks.open(x, 0);
                let hi = lo || extra.open(x, 0);
                small.set(x, lo).unwrap();
                big.set(x, hi).unwrap();
            }
            assert!(small.dominated_by(&big));
            for t in 0..8 {
                let s2 = step_ring(&small, &u, &noise, t);
                let b2 = step_ring(&big, &u, &noise, t);
                assert!(s2.dominated_by(&b2), "seed {seed} t {t}");
                small = s2;
                big = b2;
            }
        }
    }
}
