//! Neighbourhood arithmetic.

use alloc::vec::Vec;

use crate::{Error, Result};

/// A finite set of integer offsets `s_1 < s_2 < ... < s_u` defining the
/// neighbourhood `U(x) = x + U` of every site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Neighborhood {
    offsets: Vec<i64>,
}

impl Neighborhood {
    /// Builds a neighbourhood from arbitrary offsets; duplicates collapse and
    /// the result is sorted ascending.
    pub fn new(offsets: &[i64]) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::EmptyNeighborhood);
        }
        let mut v = offsets.to_vec();
        v.sort_unstable();
        v.dedup();
        Ok(Self { offsets: v })
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    /// Smallest offset `s_1`.
    pub fn min(&self) -> i64 {
        self.offsets[0]
    }

    /// Largest offset `s_u`.
    pub fn max(&self) -> i64 {
        *self.offsets.last().unwrap()
    }

    /// `s_u - s_1`.
    pub fn span(&self) -> i64 {
        self.max() - self.min()
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The reflected neighbourhood `-U` (offsets negated).
    pub fn reflected(&self) -> Self {
        let mut v: Vec<i64> = self.offsets.iter().map(|s| -s).collect();
        v.reverse();
        Self { offsets: v }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.offsets.iter().all(|s| other.offsets.contains(s))
    }
}

impl core::fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.offsets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Periodic neighbourhood of `x` on the ring `[[-n, n-1]]`:
/// `{ |x + s + n|_{2n} - n : s in U }`, deduplicated and sorted.
pub fn periodic_neighbors(x: i64, n: i64, u: &Neighborhood) -> Result<Vec<i64>> {
    if x < -n || x >= n {
        return Err(Error::SiteOutOfRange { site: x, n });
    }
    let m = 2 * n;
    let mut v: Vec<i64> = u
        .offsets()
        .iter()
        .map(|s| (x + s + n).rem_euclid(m) - n)
        .collect();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}
