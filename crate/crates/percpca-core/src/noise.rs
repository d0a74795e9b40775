//! Counter-based Bernoulli noise field.
//!
//! Every space-time vertex `(x, t)` owns one 64-bit uniform obtained by
//! hashing the packed coordinates with the replica seed; the vertex is open
//! iff that uniform falls below `round(p * 2^64)`. Consequences:
//!
//! * regenerating any sub-box yields identical bits, so replicas and worker
//!   threads need no shared stream and results cannot depend on scheduling;
//! * for a fixed seed the open set is monotone in `p` realisation by
//!   realisation (one uniform per vertex, thresholded), which is exactly the
//!   coupling the monotonicity tests rely on.

use crate::{Error, Result};

/// SplitMix64-style 64-bit mixer (multiply, then the three finalizer rounds).
/// Bijective on `u64`.
#[inline]
pub fn hash64(x: u64) -> u64 {
    let mut x = x.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives the seed of replica `index` from a master seed.
///
/// `hash64` is a bijection, so for a fixed master seed distinct indices can
/// never collide. Documented so published runs can be reproduced: the stream
/// of replica `i` is `hash64(master ^ hash64(i))`.
#[inline]
pub fn replica_seed(master_seed: u64, index: u64) -> u64 {
    hash64(master_seed ^ hash64(index))
}

/// Bernoulli(p) bits on space-time, addressed by `(site, time)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseField {
    seed: u64,
    p: f64,
    threshold: u64,
    all_open: bool,
}

impl NoiseField {
    pub fn new(seed: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                range: "[0, 1]",
            });
        }
        let all_open = p >= 1.0;
        let threshold = if all_open {
            0
        } else {
            (p * 18_446_744_073_709_551_616.0) as u64
        };
        Ok(Self {
            seed,
            p,
            threshold,
            all_open,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The per-vertex uniform, before thresholding. Coordinates must fit in
    /// 32 bits each (`|x| < 2^31`, `0 <= t < 2^32`).
    #[inline]
    pub fn uniform(&self, x: i64, t: i64) -> u64 {
        debug_assert!((i32::MIN as i64..=i32::MAX as i64).contains(&x));
        debug_assert!((0..=u32::MAX as i64).contains(&t));
        let packed = ((t as u32 as u64) << 32) | (x as u32 as u64);
        hash64(hash64(packed) ^ self.seed)
    }

    /// Whether vertex `(x, t)` is open, i.e. `w(x,t) = 1`.
    #[inline]
    pub fn open(&self, x: i64, t: i64) -> bool {
        self.all_open || self.uniform(x, t) < self.threshold
    }

    /// Word `word` of the mask row for the ring of half-width `n` at time
    /// `t`: bit `b` of the row is the noise at site `b - n`.
    pub fn ring_mask_word(&self, n: i64, word: usize, t: i64) -> u64 {
        let len = (2 * n) as usize;
        let base = word * 64;
        let lanes = 64.min(len - base);
        let mut w = 0u64;
        for lane in 0..lanes {
            if self.open((base + lane) as i64 - n, t) {
                w |= 1u64 << lane;
            }
        }
        w
    }

    /// Word `word` of the mask row for a line window starting at `lo` with
    /// `len` sites, at time `t`.
    pub fn line_mask_word(&self, lo: i64, len: usize, word: usize, t: i64) -> u64 {
        let base = word * 64;
        let lanes = 64.min(len - base);
        let mut w = 0u64;
        for lane in 0..lanes {
            if self.open(lo + (base + lane) as i64, t) {
                w |= 1u64 << lane;
            }
        }
        w
    }
}
