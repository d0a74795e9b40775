//! Replica-parallel Monte Carlo estimators.
//!
//! Replicas are independent tasks; replica `i` owns the derived seed
//! `replica_seed(master_seed, i)` and its noise is addressed by `(x, t)`, so
//! results are identical whatever the thread count or scheduling order.
//! Aggregation happens on the index-ordered vector of per-replica outcomes.

use percpca_core::sim::{
    cluster_survives, front_max, origin_state_at, run_until_absorbed, FrontOutcome,
};
use percpca_core::{replica_seed, Error, Neighborhood, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Absorption-time estimate over censored replicas.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TauEstimate {
    /// Sample mean over non-censored replicas; `None` when every replica
    /// was censored.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub censored: u64,
    pub replicas: u64,
    /// `censored > 0`: the mean underestimates `E[tau]`.
    pub lower_bound_only: bool,
    /// Mean of `min(tau, t_max)` over all replicas — always a valid lower
    /// bound on `E[tau]`, censored or not.
    pub capped_mean: f64,
}

pub fn estimate_mean_tau(
    n: i64,
    u: &Neighborhood,
    p: f64,
    replicas: u64,
    master_seed: u64,
    t_max: u64,
) -> Result<TauEstimate> {
    if replicas < 1 {
        return Err(Error::ZeroSize { name: "replicas" });
    }
    let outcomes: Vec<Option<u64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            run_until_absorbed(n, u, p, replica_seed(master_seed, i), t_max).map(|rec| rec.tau)
        })
        .collect::<Result<_>>()?;
    let observed: Vec<f64> = outcomes.iter().flatten().map(|&t| t as f64).collect();
    let censored = replicas - observed.len() as u64;
    let capped_sum: f64 = outcomes.iter().map(|o| o.unwrap_or(t_max) as f64).sum();
    let (mean, stderr) = match observed.len() {
        0 => (None, None),
        _ => {
            let (m, se) = mean_stderr(&observed);
            (Some(m), Some(se))
        }
    };
    Ok(TauEstimate {
        mean,
        stderr,
        censored,
        replicas,
        lower_bound_only: censored > 0,
        capped_mean: capped_sum / replicas as f64,
    })
}

/// A Bernoulli fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct SurvivalEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub replicas: u64,
}

fn bernoulli_estimate(hits: u64, replicas: u64) -> SurvivalEstimate {
    let r = replicas as f64;
    let p_hat = hits as f64 / r;
    SurvivalEstimate {
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / r).sqrt(),
        replicas,
    }
}

/// Fraction of replicas whose origin is 1 at time `t_end` on the ring,
/// starting from all-ones.
pub fn survival_probability(
    n: i64,
    u: &Neighborhood,
    p: f64,
    t_end: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<SurvivalEstimate> {
    if replicas < 1 {
        return Err(Error::ZeroSize { name: "replicas" });
    }
    let hits: Vec<bool> = (0..replicas)
        .into_par_iter()
        .map(|i| origin_state_at(n, u, p, replica_seed(master_seed, i), t_end))
        .collect::<Result<_>>()?;
    Ok(bernoulli_estimate(
        hits.iter().filter(|&&b| b).count() as u64,
        replicas,
    ))
}

/// Fraction of replicas whose single-origin cluster is still alive after
/// `m` steps on the line.
pub fn origin_survival(
    u: &Neighborhood,
    p: f64,
    m: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<SurvivalEstimate> {
    if replicas < 1 {
        return Err(Error::ZeroSize { name: "replicas" });
    }
    let hits: Vec<bool> = (0..replicas)
        .into_par_iter()
        .map(|i| cluster_survives(u, p, m, replica_seed(master_seed, i)))
        .collect::<Result<_>>()?;
    Ok(bernoulli_estimate(
        hits.iter().filter(|&&b| b).count() as u64,
        replicas,
    ))
}

/// Edge-speed estimates from half-infinite sources at a single depth.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct EdgeSpeedEstimate {
    /// Mean right-edge speed `r_m / m`; at most `s_u`.
    pub alpha_hat: f64,
    /// Mean left-edge speed `l_m / m`; at least `s_1`.
    pub beta_hat: f64,
    /// `alpha_hat - beta_hat`.
    pub gamma_hat: f64,
    pub alpha_stderr: f64,
    pub beta_stderr: f64,
    pub gamma_stderr: f64,
    pub m_max: u64,
    pub replicas: u64,
    /// Replicas whose truncated window went empty; their edge saturates at
    /// the window floor, so the estimate is an upper bound on the true
    /// (deeply negative) speed there.
    pub clamped_runs: u64,
}

const FRONT_PAD: i64 = 64;

/// Estimates `alpha = lim r_m/m` and `beta = lim l_m/m` by simulating the
/// reachable sets of half-infinite sources for `m_max` steps.
///
/// The right edge follows the reflected neighbourhood from `1_{x<=0}`; the
/// left edge is the mirror image. Each edge uses its own derived stream.
pub fn edge_speeds(
    u: &Neighborhood,
    p: f64,
    m_max: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<EdgeSpeedEstimate> {
    if replicas < 1 {
        return Err(Error::ZeroSize { name: "replicas" });
    }
    let reflected = u.reflected();
    let outcomes: Vec<(FrontOutcome, FrontOutcome)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let right = front_max(
                &reflected,
                p,
                m_max,
                replica_seed(master_seed, 2 * i),
                FRONT_PAD,
            )?;
            let left = front_max(u, p, m_max, replica_seed(master_seed, 2 * i + 1), FRONT_PAD)?;
            Ok((right, left))
        })
        .collect::<Result<_>>()?;
    let m = m_max as f64;
    let alphas: Vec<f64> = outcomes
        .iter()
        .map(|(r, _)| r.position as f64 / m)
        .collect();
    let betas: Vec<f64> = outcomes
        .iter()
        .map(|(_, l)| -l.position as f64 / m)
        .collect();
    let clamped_runs = outcomes
        .iter()
        .map(|(r, l)| (r.clamped as u64) + (l.clamped as u64))
        .sum();
    let (alpha_hat, alpha_stderr) = mean_stderr(&alphas);
    let (beta_hat, beta_stderr) = mean_stderr(&betas);
    Ok(EdgeSpeedEstimate {
        alpha_hat,
        beta_hat,
        gamma_hat: alpha_hat - beta_hat,
        alpha_stderr,
        beta_stderr,
        gamma_stderr: (alpha_stderr * alpha_stderr + beta_stderr * beta_stderr).sqrt(),
        m_max,
        replicas,
        clamped_runs,
    })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
