//! Gaussian posterior baselines.
//!
//! A trunk with the scorer's hidden structure maps the observation-only
//! features to a mean `μ` and a Cholesky factor `L` of the precision
//! `Q = L Lᵀ`; the score of a candidate is `−½ (v − μ)ᵀ Q (v − μ)` with `v`
//! the candidate expressed relative to the receiver.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::network::{ForwardCache, Network};
use crate::error::Result;
use crate::features::{scaled_log_distance, FeatureVector, N_FEATURES, S_MAX_DB};
use crate::rfsim::Observation;
use crate::scene::{wrap_angle, Point2};

/// Trunk output width: μ (2) and (ℓ11, ℓ21, ℓ22).
pub const GAUSS_OUT: usize = 5;

/// Length unit of the Cartesian head, meters.
pub const CARTESIAN_SCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateMode {
    Cartesian,
    Polar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianHeadParams {
    pub trunk: Network,
    pub mode: CoordinateMode,
}

/// Mean and precision factor decoded from the trunk output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments {
    pub mu: [f64; 2],
    pub l11: f64,
    pub l21: f64,
    pub l22: f64,
}

impl GaussianMoments {
    pub fn precision(&self) -> [[f64; 2]; 2] {
        let (a, b, c) = (self.l11, self.l21, self.l22);
        [[a * a, a * b], [a * b, b * b + c * c]]
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Candidate coordinates relative to the receiver for a mode.
pub fn coordinates(mode: CoordinateMode, candidate: Point2, obs: &Observation) -> [f64; 2] {
    let rel = candidate - obs.rx.position;
    match mode {
        CoordinateMode::Cartesian => [rel.x / CARTESIAN_SCALE, rel.y / CARTESIAN_SCALE],
        CoordinateMode::Polar => [scaled_log_distance(rel.norm()), rel.bearing()],
    }
}

fn residual(mode: CoordinateMode, v: [f64; 2], mu: [f64; 2]) -> [f64; 2] {
    match mode {
        CoordinateMode::Cartesian => [v[0] - mu[0], v[1] - mu[1]],
        CoordinateMode::Polar => [v[0] - mu[0], wrap_angle(v[1] - mu[1])],
    }
}

/// Trunk pass for one observation, kept for backpropagation.
pub struct GaussianForward {
    pub cache: ForwardCache,
    pub moments: GaussianMoments,
    pub residuals: Vec<[f64; 2]>,
    pub scores: Vec<f64>,
}

impl GaussianHeadParams {
    pub fn zeros(mode: CoordinateMode) -> Self {
        Self {
            trunk: Network::zeros(GAUSS_OUT),
            mode,
        }
    }

    pub fn init<R: Rng + ?Sized>(mode: CoordinateMode, rng: &mut R) -> Self {
        Self {
            trunk: Network::init(GAUSS_OUT, rng),
            mode,
        }
    }

    fn trunk_input(obs: &Observation) -> Array2<f64> {
        let f = FeatureVector::observation_only(obs, S_MAX_DB).to_array();
        Array2::from_shape_vec((1, N_FEATURES), f.to_vec()).unwrap()
    }

    fn decode(out: &[f64]) -> GaussianMoments {
        GaussianMoments {
            mu: [out[0], out[1]],
            l11: softplus(out[2]),
            l21: out[3],
            l22: softplus(out[4]),
        }
    }

    pub fn moments(&self, obs: &Observation) -> Result<GaussianMoments> {
        self.trunk.check_finite()?;
        let cache = self.trunk.forward(Self::trunk_input(obs));
        Ok(Self::decode(cache.output.row(0).as_slice().unwrap()))
    }

    pub fn forward(&self, obs: &Observation, points: &[Point2]) -> Result<GaussianForward> {
        self.trunk.check_finite()?;
        let cache = self.trunk.forward(Self::trunk_input(obs));
        let moments = Self::decode(cache.output.row(0).as_slice().unwrap());
        let residuals: Vec<[f64; 2]> = points
            .iter()
            .map(|p| residual(self.mode, coordinates(self.mode, *p, obs), moments.mu))
            .collect();
        let scores = residuals
            .iter()
            .map(|r| {
                let e1 = moments.l11 * r[0] + moments.l21 * r[1];
                let e2 = moments.l22 * r[1];
                -0.5 * (e1 * e1 + e2 * e2)
            })
            .collect();
        Ok(GaussianForward {
            cache,
            moments,
            residuals,
            scores,
        })
    }

    /// Accumulates `Σ_k weights[k] · ∂score_k/∂θ` into `grad`.
    pub fn backward(&self, fwd: &GaussianForward, weights: &[f64], grad: &mut [f64]) {
        let m = &fwd.moments;
        let mut d = [0.0; GAUSS_OUT];
        for (r, &w) in fwd.residuals.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            let e1 = m.l11 * r[0] + m.l21 * r[1];
            let e2 = m.l22 * r[1];
            // ∂score/∂μ = L e
            d[0] += w * m.l11 * e1;
            d[1] += w * (m.l21 * e1 + m.l22 * e2);
            d[2] -= w * e1 * r[0];
            d[3] -= w * e1 * r[1];
            d[4] -= w * e2 * r[1];
        }
        let out = fwd.cache.output.row(0);
        d[2] *= sigmoid(out[2]);
        d[4] *= sigmoid(out[4]);
        let d_out = Array2::from_shape_vec((1, GAUSS_OUT), d.to_vec()).unwrap();
        self.trunk.backward(&fwd.cache, &d_out, grad);
    }
}

/// Score of a single candidate under a Gaussian head.
pub fn gaussian_score(
    params: &GaussianHeadParams,
    candidate: Point2,
    obs: &Observation,
) -> Result<f64> {
    Ok(params.forward(obs, &[candidate])?.scores[0])
}
