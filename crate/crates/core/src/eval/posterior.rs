use crate::error::{Error, Result};
use crate::models::Model;
use crate::rfsim::Observation;
use crate::scene::Point2;

fn shifted_joint(scores: &[f64], log_prior: &[f64]) -> Result<(Vec<f64>, f64)> {
    let joint: Vec<f64> = scores.iter().zip(log_prior).map(|(s, p)| s + p).collect();
    let max = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::NoSupport);
    }
    if !max.is_finite() {
        return Err(Error::NonFinite("posterior scores"));
    }
    let shifted: Vec<f64> = joint.into_iter().map(|v| v - max).collect();
    let total = shifted.iter().map(|v| v.exp()).sum::<f64>();
    Ok((shifted, total))
}

/// Normalized log-posterior from scores and log-prior values, via a
/// max-shifted log-sum-exp. Candidates with zero prior get `-inf`.
pub fn log_posterior_from_scores(scores: &[f64], log_prior: &[f64]) -> Result<Vec<f64>> {
    let (shifted, total) = shifted_joint(scores, log_prior)?;
    let ln_total = total.ln();
    Ok(shifted.into_iter().map(|v| v - ln_total).collect())
}

pub fn posterior_from_scores(scores: &[f64], log_prior: &[f64]) -> Result<Vec<f64>> {
    let (shifted, total) = shifted_joint(scores, log_prior)?;
    Ok(shifted.into_iter().map(|v| v.exp() / total).collect())
}

/// `p_k ∝ exp(g(x̄_k, y)) · p₀(x̄_k)` normalized over the candidates.
pub fn normalize_posterior(
    model: &Model,
    obs: &Observation,
    candidates: &[Point2],
    prior: impl Fn(Point2) -> f64,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::Config("posterior needs at least one candidate".into()));
    }
    let log_prior: Vec<f64> = candidates.iter().map(|&p| prior(p).ln()).collect();
    if log_prior.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::NoSupport);
    }
    let scores = model.score_points(obs, candidates)?;
    posterior_from_scores(&scores, &log_prior)
}
