//! Sampled cross-entropy loss.
//!
//! For each item the partition function is replaced by the candidate average
//! `(1/K) Σ_k exp g(x̄_k, y)`, giving
//! `ℓ = −g(x, y) + log((1/K) Σ_k exp g(x̄_k, y))`. With the truth among the
//! candidates the gradient is `Σ_k (softmax_k − 1[k = truth]) ∇g(x̄_k, y)`.

use rayon::prelude::*;

use super::candidates::CandidateSet;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::rfsim::Observation;
use crate::scene::Sample;

// Items per parallel work unit. Fixed so the reduction order never depends
// on the worker count.
const CHUNK: usize = 8;

/// Max-shifted `log Σ exp`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Loss of one item from its candidate scores.
pub fn item_loss(scores: &[f64], truth_index: usize) -> f64 {
    let k = scores.len() as f64;
    -scores[truth_index] + log_sum_exp(scores) - k.ln()
}

fn item_loss_grad(
    model: &Model,
    obs: &Observation,
    set: &CandidateSet,
    scale: f64,
    grad: Option<&mut [f64]>,
) -> Result<f64> {
    let truth = set.truth_index.ok_or(Error::MissingTruth)?;
    let fwd = model.forward(obs, &set.points)?;
    let scores = fwd.scores();
    let lse = log_sum_exp(&scores);
    let loss = -scores[truth] + lse - (scores.len() as f64).ln();
    if let Some(grad) = grad {
        let mut weights: Vec<f64> = scores.iter().map(|s| scale * (s - lse).exp()).collect();
        weights[truth] -= scale;
        model.backward(&fwd, &weights, grad);
    }
    Ok(loss)
}

fn check_batch(batch: &[(Sample, CandidateSet)]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if batch.iter().any(|(_, c)| c.truth_index.is_none()) {
        return Err(Error::MissingTruth);
    }
    Ok(())
}

/// Mean sampled cross-entropy over a batch and its exact parameter gradient.
pub fn sampled_cel(model: &Model, batch: &[(Sample, CandidateSet)]) -> Result<(f64, Vec<f64>)> {
    check_batch(batch)?;
    let n_params = model.params().len();
    let scale = 1.0 / batch.len() as f64;
    let partials: Vec<(f64, Vec<f64>)> = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut grad = vec![0.0; n_params];
            let mut loss = 0.0;
            for (sample, set) in chunk {
                loss += item_loss_grad(model, &sample.obs, set, scale, Some(&mut grad))?;
            }
            Ok((loss, grad))
        })
        .collect::<Result<_>>()?;

    let mut total = 0.0;
    let mut grad = vec![0.0; n_params];
    for (loss, g) in partials {
        total += loss;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    Ok((total * scale, grad))
}

/// Mean sampled cross-entropy without gradients.
pub fn sampled_cel_value(model: &Model, batch: &[(Sample, CandidateSet)]) -> Result<f64> {
    check_batch(batch)?;
    let partials: Vec<f64> = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk.iter().try_fold(0.0, |acc, (sample, set)| {
                Ok(acc + item_loss_grad(model, &sample.obs, set, 0.0, None)?)
            })
        })
        .collect::<Result<_>>()?;
    Ok(partials.iter().sum::<f64>() / batch.len() as f64)
}
