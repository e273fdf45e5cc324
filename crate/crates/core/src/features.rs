//! Fixed input transform from a (candidate, observation) pair to the scorer
//! input vector.

use crate::error::{Error, Result};
use crate::rfsim::Observation;
use crate::scene::{wrap_angle, Point2};

/// Feature dimension.
pub const N_FEATURES: usize = 8;

/// Default SNR clip for the scaled-SNR feature, dB.
pub const S_MAX_DB: f64 = 60.0;

/// Scorer input: relative direction, log-distance, scaled SNR and the
/// heading / angle-of-arrival trigonometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub u: [f64; 2],
    pub d: f64,
    pub s: f64,
    pub cos_hr: f64,
    pub sin_hr: f64,
    pub cos_aoa: f64,
    pub sin_aoa: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.u[0],
            self.u[1],
            self.d,
            self.s,
            self.cos_hr,
            self.sin_hr,
            self.cos_aoa,
            self.sin_aoa,
        ]
    }

    /// Observation-only part with the candidate-dependent entries (`u`, `d`)
    /// zeroed.
    pub fn observation_only(obs: &Observation, s_max_db: f64) -> Self {
        let (sin_hr, cos_hr) = wrap_angle(obs.rx.heading()).sin_cos();
        let (sin_aoa, cos_aoa) = wrap_angle(obs.aoa_hat).sin_cos();
        Self {
            u: [0.0, 0.0],
            d: 0.0,
            s: scaled_snr(obs.snr_hat, s_max_db),
            cos_hr,
            sin_hr,
            cos_aoa,
            sin_aoa,
        }
    }
}

/// `clamp((10 / s_max) · log10(snr), 0, 1)`.
pub fn scaled_snr(snr_hat: f64, s_max_db: f64) -> f64 {
    let s = 10.0 / s_max_db * snr_hat.log10();
    // log10(0) = -inf clamps to 0; NaN never reaches here for snr >= 0
    s.clamp(0.0, 1.0)
}

/// `log10(max(1, r))`.
pub fn scaled_log_distance(r: f64) -> f64 {
    r.max(1.0).log10()
}

pub fn featurize(candidate: Point2, obs: &Observation, s_max_db: f64) -> Result<FeatureVector> {
    let rel = candidate - obs.rx.position;
    let r = rel.norm();
    if r == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let mut f = FeatureVector::observation_only(obs, s_max_db);
    f.u = [rel.x / r, rel.y / r];
    f.d = scaled_log_distance(r);
    Ok(f)
}
