//! Least-squares line fits for the scaling and decay experiments.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct LinFit {
    pub slope: f64,
    pub intercept: f64,
    /// `None` when the responses are (numerically) constant, where R^2 is
    /// undefined.
    pub r2: Option<f64>,
    pub points: usize,
}

/// Ordinary least squares of `y` on `x`. `None` with fewer than two points
/// or a degenerate abscissa.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let xm = xs.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_tot: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if ss_tot <= 1e-30 {
        None
    } else {
        Some(1.0 - ss_res / ss_tot)
    };
    Some(LinFit {
        slope,
        intercept,
        r2,
        points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!((f.r2.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_response_is_degenerate() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(f.r2, None);
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn noisy_line_has_partial_r2() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [0.1, 0.9, 2.2, 2.8, 4.1, 5.05];
        let f = linear_fit(&xs, &ys).unwrap();
        let r2 = f.r2.unwrap();
        assert!(r2 > 0.98 && r2 < 1.0, "{r2}");
    }

    #[test]
    fn too_few_points() {
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[2.0, 2.0], &[1.0, 3.0]).is_none());
    }
}
