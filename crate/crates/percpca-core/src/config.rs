//! Site configurations: periodic rings and finite line windows.
//!
//! Sites are packed into `u64` words. On the ring of half-width `n`, bit `b`
//! holds site `x = b - n`; this convention also fixes the configuration
//! indexing of the exact-distribution oracle.

use alloc::vec::Vec;

use crate::bits;
use crate::{Error, Result};

/// Boolean state of the `2n` sites of the ring `[[-n, n-1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingConfig {
    n: i64,
    pub(crate) words: Vec<u64>,
}

impl RingConfig {
    pub fn all_ones(n: i64) -> Self {
        assert!(n >= 1, "half-width must be >= 1");
        Self {
            n,
            words: bits::filled((2 * n) as usize),
        }
    }

    pub fn all_zeros(n: i64) -> Self {
        assert!(n >= 1, "half-width must be >= 1");
        Self {
            n,
            words: bits::zeroed((2 * n) as usize),
        }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Number of sites, `2n`.
    pub fn site_count(&self) -> usize {
        (2 * self.n) as usize
    }

    pub fn get(&self, x: i64) -> Result<bool> {
        self.bit_index(x).map(|i| bits::get(&self.words, i))
    }

    pub fn set(&mut self, x: i64, v: bool) -> Result<()> {
        let i = self.bit_index(x)?;
        bits::set(&mut self.words, i, v);
        Ok(())
    }

    fn bit_index(&self, x: i64) -> Result<usize> {
        if x < -self.n || x >= self.n {
            return Err(Error::SiteOutOfRange { site: x, n: self.n });
        }
        Ok((x + self.n) as usize)
    }

    pub fn is_all_zero(&self) -> bool {
        bits::all_zero(&self.words)
    }

    pub fn count_ones(&self) -> u64 {
        bits::count_ones(&self.words)
    }

    /// Pointwise `self <= other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Little-endian configuration index (site `-n` at bit 0), available for
    /// rings small enough to index a distribution vector.
    pub fn to_index(&self) -> Option<u64> {
        if self.site_count() <= 63 {
            Some(self.words[0])
        } else {
            None
        }
    }

    pub fn from_index(n: i64, index: u64) -> Self {
        let mut c = Self::all_zeros(n);
        assert!(c.site_count() <= 63);
        assert!(index < 1u64 << c.site_count());
        c.words[0] = index;
        c
    }
}

/// Boolean state of the sites of a window `[[lo, hi]]` of the line, plus the
/// state assumed outside the window.
///
/// `outside_value` describes the configuration this window was *constructed*
/// from; stepping shrinks the window to the sites whose value is exact
/// regardless of anything outside, and never consults `outside_value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineConfig {
    lo: i64,
    hi: i64,
    outside: bool,
    pub(crate) words: Vec<u64>,
}

impl LineConfig {
    pub fn from_fn(lo: i64, hi: i64, outside: bool, f: impl Fn(i64) -> bool) -> Self {
        assert!(lo <= hi, "window must be nonempty");
        let len = (hi - lo + 1) as usize;
        let mut words = bits::zeroed(len);
        for (i, x) in (lo..=hi).enumerate() {
            bits::set(&mut words, i, f(x));
        }
        Self {
            lo,
            hi,
            outside,
            words,
        }
    }

    /// The realisation with zeros exactly on `[[massif_lo, massif_hi]]` and
    /// ones everywhere else, represented on `[[window_lo, window_hi]]`.
    pub fn with_zero_massif(
        massif_lo: i64,
        massif_hi: i64,
        window_lo: i64,
        window_hi: i64,
    ) -> Result<Self> {
        if massif_lo > massif_hi || massif_lo <= window_lo || massif_hi >= window_hi {
            return Err(Error::InvalidMassif);
        }
        Ok(Self::from_fn(window_lo, window_hi, true, |x| {
            x < massif_lo || x > massif_hi
        }))
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn outside_value(&self) -> bool {
        self.outside
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// State of an in-window site.
    pub fn get(&self, x: i64) -> Result<bool> {
        if !self.contains(x) {
            return Err(Error::ConeViolation {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(bits::get(&self.words, (x - self.lo) as usize))
    }

    /// State of any site, reading `outside_value` beyond the window. Only
    /// meaningful for configurations as constructed, before stepping.
    pub fn get_or_outside(&self, x: i64) -> bool {
        if self.contains(x) {
            bits::get(&self.words, (x - self.lo) as usize)
        } else {
            self.outside
        }
    }

    pub fn is_all_zero(&self) -> bool {
        bits::all_zero(&self.words)
    }

    pub fn count_ones(&self) -> u64 {
        bits::count_ones(&self.words)
    }

    /// Rightmost occupied site in the window.
    pub fn max_one(&self) -> Option<i64> {
        bits::highest_set(&self.words).map(|i| self.lo + i as i64)
    }

    /// Leftmost occupied site in the window.
    pub fn min_one(&self) -> Option<i64> {
        bits::lowest_set(&self.words).map(|i| self.lo + i as i64)
    }

    pub(crate) fn raw(lo: i64, hi: i64, outside: bool, words: Vec<u64>) -> Self {
        Self {
            lo,
            hi,
            outside,
            words,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_indexing_convention() {
        // bit b <-> site b - n
        let mut c = RingConfig::all_zeros(2);
        c.set(-2, true).unwrap();
        assert_eq!(c.to_index(), Some(0b0001));
        c.set(1, true).unwrap();
        assert_eq!(c.to_index(), Some(0b1001));
        let d = RingConfig::from_index(2, 0b1001);
        assert_eq!(c, d);
        assert!(d.get(-2).unwrap() && d.get(1).unwrap());
        assert!(!d.get(-1).unwrap() && !d.get(0).unwrap());
    }

    #[test]
    fn ring_rejects_out_of_range() {
        let c = RingConfig::all_ones(3);
        assert!(c.get(3).is_err());
        assert!(c.get(-4).is_err());
    }

    #[test]
    fn line_massif_constructor() {
        let c = LineConfig::with_zero_massif(0, 5, -10, 12).unwrap();
        for x in -10..=12 {
            assert_eq!(c.get(x).unwrap(), !(0..=5).contains(&x), "site {x}");
        }
        assert!(c.get_or_outside(100));
        assert_eq!(c.max_one(), Some(12));
        assert_eq!(c.min_one(), Some(-10));
    }

    #[test]
    fn line_massif_must_sit_inside() {
        assert!(LineConfig::with_zero_massif(0, 5, 0, 12).is_err());
        assert!(LineConfig::with_zero_massif(0, 5, -3, 5).is_err());
        assert!(LineConfig::with_zero_massif(5, 0, -10, 12).is_err());
    }

    #[test]
    fn domination_is_pointwise() {
        let mut a = RingConfig::all_zeros(4);
        let mut b = RingConfig::all_zeros(4);
        a.set(1, true).unwrap();
        b.set(1, true).unwrap();
        b.set(-3, true).unwrap();
        assert!(a.dominated_by(&b));
        assert!(!b.dominated_by(&a));
    }
}
