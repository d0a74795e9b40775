//! Exact massif-edge displacement tails.
//!
//! Starting from the realisation with zeros on `[[x, y]]` (ones elsewhere,
//! `y - x >= 2 span`), the probability that the right edge satisfies
//! `R^2 >= j + y - 2 s_u` reduces to a sum over the intermediate states of
//! the window `[[y - 2 s_u + s_1, y - s_u + j]]`: sites up to `y - s_u` are
//! deterministically zero at time 1 and only the `j` sites beyond are free
//! Bernoulli(p) bits, so the enumeration is over `2^j` states.

use crate::neighborhood::Neighborhood;
use crate::pow_int;
use crate::{Error, Result};

const MAX_TWO_STEP_J: u32 = 12;
const MAX_ONE_STEP_J: u32 = 20;

/// Which massif edge the displacement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

/// Exact `P(R^1 >= j + R^0 - s_u)` (or its left mirror): the one-step tail,
/// computed by the same per-site transition bookkeeping the two-step
/// enumeration uses. Serves as a self-test of that machinery; the closed
/// form is `(1-p)^j`.
pub fn exact_one_step_displacement(
    p: f64,
    u: &Neighborhood,
    j: u32,
    direction: Direction,
) -> Result<f64> {
    check_p(p)?;
    if j > MAX_ONE_STEP_J {
        return Err(Error::GuardExceeded {
            what: "one-step displacement j",
            got: j as u64,
            limit: MAX_ONE_STEP_J as u64,
        });
    }
    let u = oriented(u, direction);
    let su = u.max();
    // event: all sites of [[x - s_1, y - s_u + j]] are zero at time 1;
    // with y = 0, the factor of site z is 1 when U(z) sits inside the
    // massif and (1-p) otherwise
    let mut prob = 1.0;
    for z in -su..=(j as i64 - su) {
        if !(z <= -su) {
            prob *= 1.0 - p;
        }
    }
    Ok(prob)
}

/// Exact `P(R^2 >= j + R^0 - 2 s_u)` (or its left mirror) from a massif with
/// `y - x >= 2 span`, by exhaustive enumeration of the intermediate window.
pub fn exact_two_step_displacement(
    p: f64,
    u: &Neighborhood,
    j: u32,
    direction: Direction,
) -> Result<f64> {
    check_p(p)?;
    if j > MAX_TWO_STEP_J {
        return Err(Error::GuardExceeded {
            what: "two-step displacement j",
            got: j as u64,
            limit: MAX_TWO_STEP_J as u64,
        });
    }
    let u = oriented(u, direction);
    let su = u.max();
    let jj = j as i64;
    // free time-1 sites (right of the deterministic-zero interval)
    let free_base = -su + 1;
    // per product site z in [[-2 s_u, -2 s_u + j]]: which free bits U(z) reads
    let free_mask = |z: i64| -> u32 {
        let mut m = 0u32;
        for &s in u.offsets() {
            let k = z + s;
            if k >= free_base && k < free_base + jj {
                m |= 1u32 << (k - free_base);
            }
            debug_assert!(k <= -su || (k >= free_base && k < free_base + jj));
        }
        m
    };
    let masks: alloc::vec::Vec<u32> = (-2 * su..=(-2 * su + jj)).map(free_mask).collect();
    let q = 1.0 - p;
    let mut total = 0.0;
    for assign in 0..(1u32 << j) {
        let ones = assign.count_ones();
        let mut term = pow_int(p, ones) * pow_int(q, j - ones);
        for &m in &masks {
            if assign & m != 0 {
                term *= q;
            }
        }
        total += term;
    }
    Ok(total)
}

fn oriented(u: &Neighborhood, direction: Direction) -> Neighborhood {
    match direction {
        Direction::Right => u.clone(),
        Direction::Left => u.reflected(),
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::two_step_bound;

    fn nb(offsets: &[i64]) -> Neighborhood {
        Neighborhood::new(offsets).unwrap()
    }

    #[test]
    fn one_step_matches_closed_form() {
        for offsets in [&[-1i64, 0][..], &[-1, 0, 1], &[0, 1], &[-1, 0, 2]] {
            let u = nb(offsets);
            for &p in &[0.0, 0.2, 0.5, 0.8, 1.0] {
                for j in 0..=10u32 {
                    for dir in [Direction::Right, Direction::Left] {
                        let got = exact_one_step_displacement(p, &u, j, dir).unwrap();
                        let want = pow_int(1.0 - p, j);
                        assert!((got - want).abs() < 1e-12, "{offsets:?} p={p} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn two_step_j0_is_certain() {
        let u = nb(&[-1, 0, 1]);
        for &p in &[0.0, 0.4, 1.0] {
            assert!(
                (exact_two_step_displacement(p, &u, 0, Direction::Right).unwrap() - 1.0).abs()
                    < 1e-15
            );
        }
    }

    #[test]
    fn two_step_j1_equality() {
        // the j=1 case is derived by equality: exactly 1 - p^2
        for offsets in [&[-1i64, 0][..], &[-1, 0, 1], &[-1, 0, 1, 2]] {
            let u = nb(offsets);
            for i in 0..=10 {
                let p = i as f64 / 10.0;
                for dir in [Direction::Right, Direction::Left] {
                    let got = exact_two_step_displacement(p, &u, 1, dir).unwrap();
                    assert!((got - (1.0 - p * p)).abs() < 1e-13, "{offsets:?} p={p}");
                }
            }
        }
    }

    #[test]
    fn frozen_two_step_values() {
        // independently enumerated reference values
        let cases: &[(&[i64], f64, u32, f64)] = &[
            (&[-1, 0], 0.5, 2, 0.5),
            (&[-1, 0], 0.1, 3, 0.954261),
            (&[-1, 0, 1], 0.5, 3, 0.3125),
            (&[-1, 0, 1], 0.2, 4, 0.74776576),
            (&[-1, 0, 1, 2], 0.7, 5, 0.0109671489),
        ];
        for &(offsets, p, j, want) in cases {
            let got = exact_two_step_displacement(p, &nb(offsets), j, Direction::Right).unwrap();
            assert!((got - want).abs() < 1e-9, "{offsets:?} p={p} j={j}: {got}");
        }
    }

    #[test]
    fn left_equals_right_for_symmetric_u() {
        let u = nb(&[-2, 0, 2]);
        for j in 0..=5u32 {
            let r = exact_two_step_displacement(0.45, &u, j, Direction::Right).unwrap();
            let l = exact_two_step_displacement(0.45, &u, j, Direction::Left).unwrap();
            assert!((r - l).abs() < 1e-14);
        }
    }

    #[test]
    fn dominates_the_closed_form_bounds() {
        for offsets in [&[-1i64, 0][..], &[-1, 0, 1], &[-1, 0, 1, 2]] {
            let u = nb(offsets);
            let jmax = u.span() as u32 + 3;
            for i in 1..10 {
                let p = i as f64 / 10.0;
                for j in 0..=jmax {
                    let exact = exact_two_step_displacement(p, &u, j, Direction::Right).unwrap();
                    let bound = two_step_bound(p, &u, j).unwrap();
                    assert!(
                        exact >= bound - 1e-12,
                        "{offsets:?} p={p} j={j}: exact {exact} < bound {bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn guard_enforced() {
        let u = nb(&[0, 1]);
        assert!(matches!(
            exact_two_step_displacement(0.5, &u, 13, Direction::Right),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
