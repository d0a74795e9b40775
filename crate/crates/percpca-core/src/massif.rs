//! Zero-massif edge tracking.
//!
//! For a configuration holding a massif of zeros with edges `L, R`, the edges
//! at the next time are defined by recursion: while `R - L >= s_u - s_1`,
//!
//! ```text
//! R' = max { x : every site of [[L - s_1, x]] is 0 at the new time }
//! L' = min { x : every site of [[x, R - s_u]] is 0 at the new time }
//! ```
//!
//! and once `R - L < s_u - s_1` both edges are sentinels forever. While the
//! massif is alive, `[[L - s_1, R - s_u]]` is zero at the next time surely
//! (every such site's neighbourhood sits inside the old massif), so both
//! scans start from certified-zero ground.

use alloc::vec::Vec;

use crate::config::LineConfig;
use crate::neighborhood::Neighborhood;
use crate::noise::NoiseField;
use crate::update::step_line;
use crate::{Error, Result};

/// Edge trajectories `(L_t, R_t)`; `None` is the sentinel pair
/// `(+inf, -inf)` of a massif that has died.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassifTrack {
    /// `left[t]` / `right[t]` are the edges at time `t`; index 0 is initial.
    pub left: Vec<Option<i64>>,
    pub right: Vec<Option<i64>>,
    pub t_horizon: usize,
}

impl MassifTrack {
    /// Time of death (first sentinel), if the massif died within the horizon.
    pub fn death_time(&self) -> Option<usize> {
        self.left.iter().position(|e| e.is_none())
    }
}

/// Locates the unique zero-massif of a configuration built with
/// `LineConfig::with_zero_massif`, erroring when the window holds none, more
/// than one, or one touching the window edge.
fn find_single_massif(cfg: &LineConfig) -> Result<(i64, i64)> {
    let (lo, hi) = cfg.window();
    let mut runs: Vec<(i64, i64)> = Vec::new();
    let mut run_start: Option<i64> = None;
    for x in lo..=hi {
        let zero = !cfg.get(x)?;
        match (zero, run_start) {
            (true, None) => run_start = Some(x),
            (false, Some(s)) => {
                runs.push((s, x - 1));
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        runs.push((s, hi));
    }
    match runs.as_slice() {
        [(a, b)] if *a > lo && *b < hi => Ok((*a, *b)),
        _ => Err(Error::InvalidMassif),
    }
}

/// Tracks the massif edges for `t_horizon` steps, implementing the recursion
/// literally. Errors with a cone violation when a scan reaches the edge of
/// the representable window (the true edge would be unknowable).
pub fn track_massif(
    initial: &LineConfig,
    u: &Neighborhood,
    noise: &NoiseField,
    t_horizon: usize,
) -> Result<MassifTrack> {
    let (l0, r0) = find_single_massif(initial)?;
    if r0 - l0 < u.span() {
        return Err(Error::InvalidMassif);
    }
    let mut left = Vec::with_capacity(t_horizon + 1);
    let mut right = Vec::with_capacity(t_horizon + 1);
    left.push(Some(l0));
    right.push(Some(r0));

    let mut cfg = initial.clone();
    let mut edges = Some((l0, r0));
    for t in 0..t_horizon {
        cfg = step_line(&cfg, u, noise, t as i64)?;
        edges = match edges {
            Some((l, r)) if r - l >= u.span() => {
                let (lo, hi) = cfg.window();
                let right_anchor = r - u.max();
                let left_anchor = l - u.min();
                if left_anchor <= lo || right_anchor >= hi {
                    return Err(Error::ConeViolation { lo, hi });
                }
                debug_assert!((left_anchor..=right_anchor).all(|x| !cfg.get(x).unwrap()));
                // rightward scan from the certified-zero interval's right
                // end; get() turns a scan past the window into ConeViolation
                let mut rr = right_anchor;
                while !cfg.get(rr + 1)? {
                    rr += 1;
                }
                // leftward scan from its left end
                let mut ll = left_anchor;
                while !cfg.get(ll - 1)? {
                    ll -= 1;
                }
                Some((ll, rr))
            }
            _ => None,
        };
        match edges {
            Some((l, r)) => {
                left.push(Some(l));
                right.push(Some(r));
            }
            None => {
                left.push(None);
                right.push(None);
            }
        }
    }
    Ok(MassifTrack {
        left,
        right,
        t_horizon,
    })
}
