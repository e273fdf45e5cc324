use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{entropy, MetricsReport};
use super::posterior::log_posterior_from_scores;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::scene::{prior_density, stream_rng, Point2, Region, Sample, Stream};
use crate::train::{item_loss, sample_candidates, CandidateSet};

/// Grid spacing giving 31 × 31 = 961 points over a 100 m square.
pub const DEFAULT_GRID_SPACING: f64 = 100.0 / 30.0;
pub const DEFAULT_RANDOM_K: usize = 1000;

/// Regular grid over a region, centred so the margins are equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point2,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(region: &Region, spacing: f64) -> Result<Self> {
        region.validate()?;
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing}")));
        }
        let count = |extent: f64| (extent / spacing + 1e-9).floor() as usize + 1;
        let (nx, ny) = (count(region.width()), count(region.height()));
        let margin = |extent: f64, n: usize| 0.5 * (extent - (n - 1) as f64 * spacing);
        Ok(Self {
            origin: Point2::new(
                region.x_min + margin(region.width(), nx),
                region.y_min + margin(region.height(), ny),
            ),
            spacing,
            nx,
            ny,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + ix as f64 * self.spacing,
            self.origin.y + iy as f64 * self.spacing,
        )
    }

    /// Row-major points: `y` index outer, `x` index inner.
    pub fn points(&self) -> Vec<Point2> {
        (0..self.ny)
            .flat_map(|iy| (0..self.nx).map(move |ix| self.point(ix, iy)))
            .collect()
    }

    pub fn nearest_index(&self, p: Point2) -> usize {
        let snap = |v: f64, o: f64, n: usize| {
            (((v - o) / self.spacing).round().max(0.0) as usize).min(n - 1)
        };
        snap(p.y, self.origin.y, self.ny) * self.nx + snap(p.x, self.origin.x, self.nx)
    }
}

/// How evaluation candidate sets are built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum EvalScheme {
    Grid { spacing: f64 },
    Random { k: usize },
}

impl EvalScheme {
    pub fn name(&self) -> &'static str {
        match self {
            EvalScheme::Grid { .. } => "grid",
            EvalScheme::Random { .. } => "random",
        }
    }

    pub fn k(&self, region: &Region) -> Result<usize> {
        match self {
            EvalScheme::Grid { spacing } => Ok(GridSpec::new(region, *spacing)?.len()),
            EvalScheme::Random { k } => Ok(*k),
        }
    }
}

impl Default for EvalScheme {
    fn default() -> Self {
        EvalScheme::Grid {
            spacing: DEFAULT_GRID_SPACING,
        }
    }
}

/// Candidate set for evaluation item `index`.
///
/// Grid: the truth replaces its nearest grid point, so the set still has
/// exactly `nx · ny` members. Random: `k − 1` uniform points plus the truth.
pub fn eval_candidates(
    scheme: &EvalScheme,
    grid_points: &[Point2],
    grid: Option<&GridSpec>,
    truth: Point2,
    region: &Region,
    seed: u64,
    index: u64,
) -> Result<CandidateSet> {
    match (scheme, grid) {
        (EvalScheme::Grid { .. }, Some(grid)) => {
            let mut points = grid_points.to_vec();
            let t = grid.nearest_index(truth);
            points[t] = truth;
            Ok(CandidateSet {
                points,
                truth_index: Some(t),
            })
        }
        (EvalScheme::Random { k }, _) => {
            let mut rng = stream_rng(seed, Stream::EvalCandidates, index);
            sample_candidates(&mut rng, truth, *k, region)
        }
        _ => unreachable!("grid scheme without grid"),
    }
}

/// Per-item loss and posterior entropy.
fn evaluate_items(
    model: &Model,
    eval_set: &[Sample],
    scheme: &EvalScheme,
    region: &Region,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if eval_set.is_empty() {
        return Err(Error::Config("evaluation set is empty".into()));
    }
    let grid = match scheme {
        EvalScheme::Grid { spacing } => Some(GridSpec::new(region, *spacing)?),
        EvalScheme::Random { .. } => None,
    };
    let grid_points = grid.as_ref().map(GridSpec::points).unwrap_or_default();
    eval_set
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let set = eval_candidates(scheme, &grid_points, grid.as_ref(), s.tx, region, seed, i as u64)?;
            let scores = model.score_points(&s.obs, &set.points)?;
            let loss = item_loss(&scores, set.truth_index.expect("eval sets include truth"));
            let log_prior: Vec<f64> = set
                .points
                .iter()
                .map(|&p| prior_density(p, region).ln())
                .collect();
            let p: Vec<f64> = log_posterior_from_scores(&scores, &log_prior)?
                .into_iter()
                .map(f64::exp)
                .collect();
            Ok((loss, entropy(&p)?))
        })
        .collect()
}

/// Mean sampled cross-entropy over an evaluation set.
pub fn eval_loss(
    model: &Model,
    eval_set: &[Sample],
    scheme: &EvalScheme,
    region: &Region,
    seed: u64,
) -> Result<f64> {
    Ok(evaluate(model, eval_set, scheme, region, seed)?.loss)
}

/// Loss, metrics and entropy summary for one scheme.
pub fn evaluate(
    model: &Model,
    eval_set: &[Sample],
    scheme: &EvalScheme,
    region: &Region,
    seed: u64,
) -> Result<MetricsReport> {
    let items = evaluate_items(model, eval_set, scheme, region, seed)?;
    let loss = items.iter().map(|(l, _)| l).sum::<f64>() / items.len() as f64;
    let entropies: Vec<f64> = items.iter().map(|(_, h)| *h).collect();
    Ok(MetricsReport::new(scheme.name(), scheme.k(region)?, loss, &entropies))
}
