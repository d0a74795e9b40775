//! Packed bit arrays for site configurations.
//!
//! Bit `i` of word `i / 64` holds one site; trailing bits of the last word
//! are kept zero so whole-word operations stay valid.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

/// Mask selecting the valid bits of the last word.
pub(crate) fn tail_mask(len: usize) -> u64 {
    let r = len % 64;
    if r == 0 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

pub(crate) fn zeroed(len: usize) -> Vec<u64> {
    vec![0u64; word_count(len)]
}

pub(crate) fn filled(len: usize) -> Vec<u64> {
    let mut w = vec![u64::MAX; word_count(len)];
    if let Some(last) = w.last_mut() {
        *last &= tail_mask(len);
    }
    w
}

#[inline]
pub(crate) fn get(words: &[u64], i: usize) -> bool {
    (words[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
pub(crate) fn set(words: &mut [u64], i: usize, v: bool) {
    if v {
        words[i / 64] |= 1u64 << (i % 64);
    } else {
        words[i / 64] &= !(1u64 << (i % 64));
    }
}

pub(crate) fn all_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

pub(crate) fn count_ones(words: &[u64]) -> u64 {
    words.iter().map(|w| w.count_ones() as u64).sum()
}

/// Index of the highest set bit, if any.
pub(crate) fn highest_set(words: &[u64]) -> Option<usize> {
    for (wi, &w) in words.iter().enumerate().rev() {
        if w != 0 {
            return Some(wi * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

/// Index of the lowest set bit, if any.
pub(crate) fn lowest_set(words: &[u64]) -> Option<usize> {
    for (wi, &w) in words.iter().enumerate() {
        if w != 0 {
            return Some(wi * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

/// 64 consecutive bits of a ring of `len` bits, starting at `start`
/// (already reduced modulo `len`), wrapping as needed.
pub(crate) fn extract64_ring(words: &[u64], len: usize, start: usize) -> u64 {
    debug_assert!(start < len);
    let mut out = 0u64;
    let mut got = 0usize;
    let mut pos = start;
    while got < 64 {
        let b = pos % 64;
        let take = (64 - b).min(len - pos).min(64 - got);
        let chunk = (words[pos / 64] >> b) & low_mask(take);
        out |= chunk << got;
        got += take;
        pos += take;
        if pos == len {
            pos = 0;
        }
    }
    out
}

/// 64 consecutive bits of a finite window of `len` bits starting at the
/// signed offset `start`; positions outside `[0, len)` read as zero.
pub(crate) fn extract64_line(words: &[u64], len: usize, start: i64) -> u64 {
    if start >= len as i64 || start <= -64 {
        return 0;
    }
    let mut out = 0u64;
    // lanes [0, skip) fall before the window
    let skip = (-start).max(0) as usize;
    let mut got = skip;
    let mut pos = (start + skip as i64) as usize;
    while got < 64 && pos < len {
        let b = pos % 64;
        let take = (64 - b).min(len - pos).min(64 - got);
        let chunk = (words[pos / 64] >> b) & low_mask(take);
        out |= chunk << got;
        got += take;
        pos += take;
    }
    out
}

#[inline]
fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}
