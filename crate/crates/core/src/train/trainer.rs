use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adamw::{adamw_step, AdamWConfig, AdamWState};
use super::candidates::{sample_candidates, CandidateSet};
use super::loss::{sampled_cel, sampled_cel_value};
use crate::error::{Error, Result};
use crate::models::{Model, ModelKind};
use crate::scene::{stream_rng, Region, Sample, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub k_candidates: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    /// Fraction of the dataset used for training; the rest validates.
    pub split_fraction: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// Desk-scale defaults with the model kind's learning rate.
    pub fn for_kind(kind: ModelKind) -> Self {
        Self {
            k_candidates: 128,
            epochs: 200,
            learning_rate: kind.default_learning_rate(),
            weight_decay: 1e-4,
            batch_size: 64,
            split_fraction: 0.75,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.k_candidates < 2 {
            return bad(format!("k_candidates must be >= 2, got {}", self.k_candidates));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return bad(format!("split_fraction must lie in (0, 1), got {}", self.split_fraction));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if !(self.learning_rate > 0.0) || !(self.weight_decay >= 0.0) {
            return bad("learning rate must be positive and weight decay non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the lowest validation loss (the
    /// initialization when no epoch ran).
    pub best: Model,
    pub best_epoch: Option<usize>,
    pub history: Vec<EpochRecord>,
}

/// Deterministic train/validation index split.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(seed, Stream::Split, 0));
    let n_train = ((n as f64 * fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let val = idx.split_off(n_train.min(n));
    (idx, val)
}

/// Trains a scoring head with mini-batch AdamW on the sampled
/// cross-entropy loss.
///
/// Training candidate sets are redrawn every epoch; validation sets are drawn
/// once so that best-epoch selection compares like with like.
pub fn train(
    dataset: &[Sample],
    kind: ModelKind,
    cfg: &TrainConfig,
    region: &Region,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if dataset.len() < 2 {
        return Err(Error::Config(
            "training needs at least two samples (one for validation)".into(),
        ));
    }
    let (train_idx, val_idx) = split_indices(dataset.len(), cfg.split_fraction, cfg.seed);

    let val_batch: Vec<(Sample, CandidateSet)> = val_idx
        .iter()
        .map(|&i| {
            let s = dataset[i];
            let mut rng = stream_rng(cfg.seed, Stream::ValCandidates, i as u64);
            Ok((s, sample_candidates(&mut rng, s.tx, cfg.k_candidates, region)?))
        })
        .collect::<Result<_>>()?;

    let mut model = Model::init(kind, cfg.seed);
    let mut best = model.clone();
    let mut best_epoch = None;
    let mut best_val = f64::INFINITY;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut state = AdamWState::new(model.params().len());
    let opt = AdamWConfig::new(cfg.learning_rate, cfg.weight_decay);
    let n_total = dataset.len() as u64;

    for epoch in 0..cfg.epochs {
        let mut order = train_idx.clone();
        order.shuffle(&mut stream_rng(cfg.seed, Stream::Shuffle, epoch as u64));

        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(Sample, CandidateSet)> = chunk
                .iter()
                .map(|&i| {
                    let s = dataset[i];
                    let stream = epoch as u64 * n_total + i as u64;
                    let mut rng = stream_rng(cfg.seed, Stream::TrainCandidates, stream);
                    Ok((s, sample_candidates(&mut rng, s.tx, cfg.k_candidates, region)?))
                })
                .collect::<Result<_>>()?;
            let (loss, grad) = sampled_cel(&model, &batch)?;
            adamw_step(model.params_mut(), &grad, &mut state, &opt)?;
            loss_sum += loss * batch.len() as f64;
        }
        let train_loss = loss_sum / order.len() as f64;
        let val_loss = sampled_cel_value(&model, &val_batch)?;
        if !val_loss.is_finite() || !train_loss.is_finite() {
            return Err(Error::NonFinite("training loss"));
        }
        if val_loss < best_val {
            best_val = val_loss;
            best = model.clone();
            best_epoch = Some(epoch);
        }
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
    }

    Ok(TrainOutcome {
        best,
        best_epoch,
        history,
    })
}

/// Training history as CSV with a provenance comment line.
pub fn history_csv(history: &[EpochRecord], seed: u64, config_hash: &str) -> String {
    let mut out = format!("# seed={seed},config_hash={config_hash}\nepoch,train_loss,val_loss\n");
    for r in history {
        out.push_str(&format!("{},{},{}\n", r.epoch, r.train_loss, r.val_loss));
    }
    out
}
