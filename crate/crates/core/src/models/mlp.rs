//! Candidate-likelihood scorer: features → 64 → ReLU → 16 → ReLU → scalar logit.

use ndarray::Array2;
use rand::Rng;

use super::network::{split_layers, Network, N1, N2, N_IN};
use crate::error::Result;
use crate::features::{featurize, FeatureVector, N_FEATURES, S_MAX_DB};
use crate::rfsim::Observation;
use crate::scene::Point2;

/// Parameters of the scalar-output scoring network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams(pub Network);

impl MlpParams {
    pub fn zeros() -> Self {
        Self(Network::zeros(1))
    }

    pub fn init<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(Network::init(1, rng))
    }

    pub fn network(&self) -> &Network {
        &self.0
    }

    pub fn theta(&self) -> &[f64] {
        self.0.theta()
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        self.0.theta_mut()
    }

    /// Sets the output bias; handy for constant-score baselines.
    pub fn with_output_bias(mut self, bias: f64) -> Self {
        let n = self.0.theta().len();
        self.0.theta_mut()[n - 1] = bias;
        self
    }

    /// Feature matrix for a set of candidate positions.
    pub fn feature_matrix(obs: &Observation, points: &[Point2]) -> Result<Array2<f64>> {
        let mut x = Array2::zeros((points.len(), N_FEATURES));
        for (mut row, p) in x.rows_mut().into_iter().zip(points) {
            let f = featurize(*p, obs, S_MAX_DB)?.to_array();
            row.assign(&ndarray::ArrayView1::from(&f));
        }
        Ok(x)
    }

    /// Scores for every candidate position.
    pub fn score_points(&self, obs: &Observation, points: &[Point2]) -> Result<Vec<f64>> {
        self.0.check_finite()?;
        let x = Self::feature_matrix(obs, points)?;
        Ok(self.0.forward(x).output.column(0).to_vec())
    }
}

/// Forward pass for a single feature vector.
pub fn mlp_score(params: &MlpParams, f: &FeatureVector) -> Result<f64> {
    params.0.check_finite()?;
    let x = Array2::from_shape_vec((1, N_FEATURES), f.to_array().to_vec()).unwrap();
    Ok(params.0.forward(x).output[[0, 0]])
}

/// Score and its exact gradient with respect to every parameter.
///
/// Written as explicit loops rather than through the batched path so the
/// two can be checked against each other.
pub fn mlp_score_grad(params: &MlpParams, f: &FeatureVector) -> Result<(f64, MlpParams)> {
    params.0.check_finite()?;
    let l = split_layers(params.theta(), 1);
    let x = f.to_array();

    let mut h1 = [0.0; N1];
    for j in 0..N1 {
        let mut acc = l.b1[j];
        for i in 0..N_IN {
            acc += l.w1[[j, i]] * x[i];
        }
        h1[j] = acc.max(0.0);
    }
    let mut h2 = [0.0; N2];
    for j in 0..N2 {
        let mut acc = l.b2[j];
        for i in 0..N1 {
            acc += l.w2[[j, i]] * h1[i];
        }
        h2[j] = acc.max(0.0);
    }
    let mut score = l.b3[0];
    for i in 0..N2 {
        score += l.w3[[0, i]] * h2[i];
    }

    let mut grad = MlpParams::zeros();
    {
        let g = super::network::split_layers_mut(grad.theta_mut(), 1);
        let super::network::LayersMut {
            mut w1,
            mut b1,
            mut w2,
            mut b2,
            mut w3,
            mut b3,
        } = g;
        b3[0] = 1.0;
        let mut d2 = [0.0; N2];
        for j in 0..N2 {
            w3[[0, j]] = h2[j];
            d2[j] = if h2[j] > 0.0 { l.w3[[0, j]] } else { 0.0 };
            b2[j] = d2[j];
        }
        let mut d1 = [0.0; N1];
        for i in 0..N1 {
            let mut acc = 0.0;
            for j in 0..N2 {
                w2[[j, i]] = d2[j] * h1[i];
                acc += d2[j] * l.w2[[j, i]];
            }
            d1[i] = if h1[i] > 0.0 { acc } else { 0.0 };
            b1[i] = d1[i];
        }
        for j in 0..N1 {
            for i in 0..N_IN {
                w1[[j, i]] = d1[j] * x[i];
            }
        }
    }
    Ok((score, grad))
}
