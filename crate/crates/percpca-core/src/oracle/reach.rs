//! Open-path reachability on the oriented space-time graph.
//!
//! Vertex `(x, t)` connects to the line `y = 0` iff its noise bit is open and
//! some neighbour at `t - 1` connects; at `t = 0` connectivity is the initial
//! state. Computed per vertex from the graph definition, independently of the
//! word-packed kernel, so agreement with simulated trajectories is a real
//! cross-check of both.

use alloc::vec::Vec;

use crate::config::RingConfig;
use crate::neighborhood::{periodic_neighbors, Neighborhood};
use crate::noise::NoiseField;
use crate::Result;

/// Connectivity of every vertex of a `ring x [0, t_max]` box to the base
/// line through open paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilitySet {
    n: i64,
    t_max: u32,
    rows: Vec<Vec<bool>>,
}

impl ReachabilitySet {
    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    /// Whether `(x, t)` is joined to the base line by an open path.
    pub fn connected(&self, x: i64, t: u32) -> Result<bool> {
        if x < -self.n || x >= self.n {
            return Err(crate::Error::SiteOutOfRange { site: x, n: self.n });
        }
        Ok(self.rows[t as usize][(x + self.n) as usize])
    }

    /// Whether any site of the top row is connected.
    pub fn any_connected_at(&self, t: u32) -> bool {
        self.rows[t as usize].iter().any(|&b| b)
    }
}

/// Builds the reachability set of the periodic box by dynamic programming
/// down the time axis (vertex `(x, t)` consumes noise row `t - 1`, matching
/// the update map's bookkeeping).
pub fn reachability_ring(
    noise: &NoiseField,
    u: &Neighborhood,
    initial: &RingConfig,
    t_max: u32,
) -> Result<ReachabilitySet> {
    let n = initial.n();
    let sites = initial.site_count();
    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(t_max as usize + 1);
    let base: Vec<bool> = (-n..n).map(|x| initial.get(x).unwrap()).collect();
    rows.push(base);
    let nbrs: Vec<Vec<i64>> = (-n..n)
        .map(|x| periodic_neighbors(x, n, u))
        .collect::<Result<_>>()?;
    for t in 1..=t_max {
        let prev = &rows[t as usize - 1];
        let row: Vec<bool> = (0..sites)
            .map(|i| {
                let x = i as i64 - n;
                noise.open(x, t as i64 - 1) && nbrs[i].iter().any(|&k| prev[(k + n) as usize])
            })
            .collect();
        rows.push(row);
    }
    Ok(ReachabilitySet { n, t_max, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::update::step_ring;

    fn nb(offsets: &[i64]) -> Neighborhood {
        Neighborhood::new(offsets).unwrap()
    }

    #[test]
    fn all_open_all_ones_connects_everything() {
        let u = nb(&[-1, 0, 1]);
        let noise = NoiseField::new(5, 1.0).unwrap();
        let r = reachability_ring(&noise, &u, &RingConfig::all_ones(3), 4).unwrap();
        for t in 0..=4 {
            for x in -3..3 {
                assert!(r.connected(x, t).unwrap());
            }
        }
    }

    #[test]
    fn all_closed_disconnects_positive_times() {
        let u = nb(&[-1, 0, 1]);
        let noise = NoiseField::new(5, 0.0).unwrap();
        let r = reachability_ring(&noise, &u, &RingConfig::all_ones(3), 3).unwrap();
        for x in -3..3 {
            assert!(r.connected(x, 0).unwrap());
            for t in 1..=3 {
                assert!(!r.connected(x, t).unwrap());
            }
        }
    }

    #[test]
    fn base_row_is_initial_state() {
        let u = nb(&[0, 1]);
        let noise = NoiseField::new(5, 0.5).unwrap();
        let mut init = RingConfig::all_zeros(4);
        init.set(-2, true).unwrap();
        init.set(3, true).unwrap();
        let r = reachability_ring(&noise, &u, &init, 2).unwrap();
        for x in -4..4 {
            assert_eq!(r.connected(x, 0).unwrap(), init.get(x).unwrap());
        }
    }

    #[test]
    fn matches_simulated_trajectory() {
        // connected(x, t) <=> eta_x^t = 1 under the update map, bit for bit
        let u = nb(&[-1, 0, 1]);
        let n = 3i64;
        let t_max = 5u32;
        for run in 0..200u64 {
            let noise = NoiseField::new(crate::replica_seed(17, run), 0.55).unwrap();
            let picks = NoiseField::new(crate::replica_seed(18, run), 0.5).unwrap();
            let mut init = RingConfig::all_zeros(n);
            for x in -n..n {
                init.set(x, picks.open(x, 0)).unwrap();
            }
            let reach = reachability_ring(&noise, &u, &init, t_max).unwrap();
            let mut cfg = init.clone();
            for t in 1..=t_max {
                cfg = step_ring(&cfg, &u, &noise, t as i64 - 1);
                for x in -n..n {
                    assert_eq!(
                        reach.connected(x, t).unwrap(),
                        cfg.get(x).unwrap(),
                        "run {run} x {x} t {t}"
                    );
                }
            }
        }
    }
}
