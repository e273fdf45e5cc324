//! Scoring heads: the candidate-likelihood MLP and the two Gaussian baselines.

pub mod checkpoint;
pub mod gaussian;
pub mod mlp;
pub mod network;

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rfsim::Observation;
use crate::scene::{stream_rng, Point2, Stream};

pub use checkpoint::{deserialize_params, serialize_params, Checkpoint};
pub use gaussian::{gaussian_score, CoordinateMode, GaussianHeadParams, GaussianMoments};
pub use mlp::{mlp_score, mlp_score_grad, MlpParams};
pub use network::{ForwardCache, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "mccle")]
    Mccle,
    #[serde(rename = "gauss-cart")]
    GaussCart,
    #[serde(rename = "gauss-polar")]
    GaussPolar,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Mccle, ModelKind::GaussCart, ModelKind::GaussPolar];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Mccle => "mccle",
            ModelKind::GaussCart => "gauss-cart",
            ModelKind::GaussPolar => "gauss-polar",
        }
    }

    /// Default learning rate: 0.01 for the MLP scorer, 0.002 for Gaussian heads.
    pub fn default_learning_rate(&self) -> f64 {
        match self {
            ModelKind::Mccle => 0.01,
            _ => 0.002,
        }
    }

    pub fn output_width(&self) -> usize {
        match self {
            ModelKind::Mccle => 1,
            _ => gaussian::GAUSS_OUT,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mccle" | "mc-cle" => Ok(ModelKind::Mccle),
            "gauss-cart" => Ok(ModelKind::GaussCart),
            "gauss-polar" => Ok(ModelKind::GaussPolar),
            other => Err(Error::Config(format!("unknown model kind '{other}'"))),
        }
    }
}

/// A scoring head `g(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Mccle(MlpParams),
    Gaussian(GaussianHeadParams),
}

/// Scores of one candidate set plus whatever the backward pass needs.
pub enum Forward {
    Mccle { cache: ForwardCache },
    Gaussian(gaussian::GaussianForward),
}

impl Forward {
    pub fn scores(&self) -> Vec<f64> {
        match self {
            Forward::Mccle { cache } => cache.output.column(0).to_vec(),
            Forward::Gaussian(g) => g.scores.clone(),
        }
    }
}

impl Model {
    /// Seeded initialization.
    pub fn init(kind: ModelKind, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Init, 0);
        match kind {
            ModelKind::Mccle => Model::Mccle(MlpParams::init(&mut rng)),
            ModelKind::GaussCart => {
                Model::Gaussian(GaussianHeadParams::init(CoordinateMode::Cartesian, &mut rng))
            }
            ModelKind::GaussPolar => {
                Model::Gaussian(GaussianHeadParams::init(CoordinateMode::Polar, &mut rng))
            }
        }
    }

    /// Constant-score model: the uniform-posterior baseline.
    pub fn constant(value: f64) -> Self {
        Model::Mccle(MlpParams::zeros().with_output_bias(value))
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Mccle(_) => ModelKind::Mccle,
            Model::Gaussian(g) => match g.mode {
                CoordinateMode::Cartesian => ModelKind::GaussCart,
                CoordinateMode::Polar => ModelKind::GaussPolar,
            },
        }
    }

    pub fn network(&self) -> &Network {
        match self {
            Model::Mccle(p) => &p.0,
            Model::Gaussian(g) => &g.trunk,
        }
    }

    pub fn params(&self) -> &[f64] {
        self.network().theta()
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        match self {
            Model::Mccle(p) => p.theta_mut(),
            Model::Gaussian(g) => g.trunk.theta_mut(),
        }
    }

    pub fn forward(&self, obs: &Observation, points: &[Point2]) -> Result<Forward> {
        match self {
            Model::Mccle(p) => {
                p.0.check_finite()?;
                let x = MlpParams::feature_matrix(obs, points)?;
                Ok(Forward::Mccle {
                    cache: p.0.forward(x),
                })
            }
            Model::Gaussian(g) => Ok(Forward::Gaussian(g.forward(obs, points)?)),
        }
    }

    /// Accumulates `Σ_k weights[k] · ∂g(x_k, y)/∂θ` into `grad`.
    pub fn backward(&self, fwd: &Forward, weights: &[f64], grad: &mut [f64]) {
        match (self, fwd) {
            (Model::Mccle(p), Forward::Mccle { cache }) => {
                let d = Array2::from_shape_vec((weights.len(), 1), weights.to_vec()).unwrap();
                p.0.backward(cache, &d, grad);
            }
            (Model::Gaussian(g), Forward::Gaussian(f)) => g.backward(f, weights, grad),
            _ => unreachable!("forward pass from a different model kind"),
        }
    }

    pub fn score_points(&self, obs: &Observation, points: &[Point2]) -> Result<Vec<f64>> {
        Ok(self.forward(obs, points)?.scores())
    }

    pub fn score(&self, candidate: Point2, obs: &Observation) -> Result<f64> {
        Ok(self.score_points(obs, &[candidate])?[0])
    }
}
