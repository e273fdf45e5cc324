//! Free-space line-of-sight measurement simulator.
//!
//! A single-path channel seen through an azimuth-plane uniform linear array:
//! the matched-filter snapshot
//!
//! ```text
//! z[n] = g · B(φ − φr) · a(φ − φr) · sinc((τ − nT)/T) + w[n]
//! ```
//!
//! is scanned over a global angle grid. The angle estimate is the grid angle
//! maximising `max_n |a(θ − φr)ᴴ z[n]|²` and the SNR estimate is the value of
//! that maximum. Steering vectors have unit norm and the noise is unit
//! variance, so the SNR estimate is directly in post-beamforming SNR units.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{sample_geometry, stream_rng, wrap_angle, Point2, Pose2D, Region, Sample, Stream, TWO_PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_elements: usize,
    pub spacing_wavelengths: f64,
    pub carrier_hz: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            n_elements: 8,
            spacing_wavelengths: 0.5,
            carrier_hz: 12e9,
        }
    }
}

/// Parabolic-in-dB single-element azimuth pattern with a front-to-back clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementPattern {
    /// Full 3 dB beamwidth, radians.
    pub beamwidth_3db: f64,
    pub max_attenuation_db: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        Self {
            beamwidth_3db: 65f64.to_radians(),
            max_attenuation_db: 30.0,
        }
    }
}

/// Post-beamforming boresight SNR as a function of range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// SNR at the 1 m reference distance, dB.
    pub snr0_db: f64,
    pub pathloss_exponent: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            snr0_db: 60.0,
            pathloss_exponent: 2.0,
        }
    }
}

impl LinkBudget {
    pub fn snr_db(&self, distance: f64) -> f64 {
        self.snr0_db - 10.0 * self.pathloss_exponent * distance.log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedFilterConfig {
    pub n_samples: usize,
    /// Spacing of the angle search grid, radians.
    pub angle_grid_step: f64,
    pub bandwidth_hz: f64,
}

impl Default for MatchedFilterConfig {
    fn default() -> Self {
        Self {
            n_samples: 5,
            angle_grid_step: 0.5f64.to_radians(),
            bandwidth_hz: 200e6,
        }
    }
}

impl MatchedFilterConfig {
    pub fn sample_period(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    /// Number of grid angles covering [-π, π).
    pub fn grid_len(&self) -> Result<usize> {
        let n = (TWO_PI / self.angle_grid_step).round();
        if !(n >= 1.0) || ((n * self.angle_grid_step) - TWO_PI).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "angle grid step {} does not divide 2π",
                self.angle_grid_step
            )));
        }
        Ok(n as usize)
    }
}

/// Global search grid angle for index `i` of `n`.
pub fn grid_angle(i: usize, n: usize) -> f64 {
    -PI + TWO_PI * i as f64 / n as f64
}

/// Full simulator configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub array: ArrayConfig,
    pub pattern: ElementPattern,
    pub link: LinkBudget,
    pub filter: MatchedFilterConfig,
    /// Minimum transmitter–receiver separation enforced at generation, meters.
    pub min_separation: f64,
    /// Additive receiver noise; disabled only in tests and diagnostics.
    pub noise: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            array: ArrayConfig::default(),
            pattern: ElementPattern::default(),
            link: LinkBudget::default(),
            filter: MatchedFilterConfig::default(),
            min_separation: 1.0,
            noise: true,
        }
    }
}

impl SimConfig {
    pub fn noiseless() -> Self {
        Self {
            noise: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.array.n_elements < 2 {
            return bad("array needs at least two elements");
        }
        if !(self.array.spacing_wavelengths > 0.0) {
            return bad("element spacing must be positive");
        }
        if !(self.pattern.beamwidth_3db > 0.0) || !(self.pattern.max_attenuation_db > 0.0) {
            return bad("element pattern needs positive beamwidth and attenuation");
        }
        if !self.link.snr0_db.is_finite() || !(self.link.pathloss_exponent > 0.0) {
            return bad("link budget must be finite with positive exponent");
        }
        if self.filter.n_samples == 0 || !(self.filter.bandwidth_hz > 0.0) {
            return bad("matched filter needs samples and positive bandwidth");
        }
        if !(self.min_separation > 0.0) {
            return bad("minimum separation must be positive");
        }
        self.filter.grid_len().map(|_| ())
    }
}

/// Receiver measurement: pose, estimated global angle of arrival and
/// estimated (linear) SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub rx: Pose2D,
    pub aoa_hat: f64,
    pub snr_hat: f64,
}

/// Element amplitude response for a local angle.
pub fn element_gain(phi_local: f64, pattern: &ElementPattern) -> f64 {
    let phi = wrap_angle(phi_local);
    let ratio = phi / pattern.beamwidth_3db;
    let atten_db = (12.0 * ratio * ratio).min(pattern.max_attenuation_db);
    10f64.powf(-atten_db / 20.0)
}

/// Unit-norm ULA steering vector for a local angle.
pub fn array_response(phi_local: f64, cfg: &ArrayConfig) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); cfg.n_elements];
    fill_array_response(phi_local, cfg, &mut out);
    out
}

fn fill_array_response(phi_local: f64, cfg: &ArrayConfig, out: &mut [Complex64]) {
    let psi = TWO_PI * cfg.spacing_wavelengths * phi_local.sin();
    let amp = 1.0 / (cfg.n_elements as f64).sqrt();
    for (k, v) in out.iter_mut().enumerate() {
        *v = Complex64::from_polar(amp, psi * k as f64);
    }
}

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Matched-filter output for one transmission, plus the hidden channel
/// parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// `samples[n][k]`: filter output at sample `n` on element `k`.
    pub samples: Vec<Vec<Complex64>>,
    /// True global angle of arrival.
    pub aoa: f64,
    pub gain: Complex64,
    /// Delay as a fraction of the sample period, in [0, 1).
    pub tau_frac: f64,
}

impl Snapshot {
    /// Noiseless peak SNR `|g B|² · max_n sinc²((τ − nT)/T)` for a perfectly
    /// steered beam.
    pub fn noiseless_peak(&self, rx: &Pose2D, cfg: &SimConfig) -> f64 {
        let b = element_gain(rx.to_local(self.aoa), &cfg.pattern);
        let s = (0..cfg.filter.n_samples)
            .map(|n| sinc(self.tau_frac - n as f64).powi(2))
            .fold(0.0, f64::max);
        self.gain.norm_sqr() * b * b * s
    }
}

/// Builds the matched-filter snapshot for one TX/RX geometry.
pub fn simulate_snapshot<R: Rng + ?Sized>(
    tx: Point2,
    rx: &Pose2D,
    rng: &mut R,
    cfg: &SimConfig,
) -> Snapshot {
    let delta = tx - rx.position;
    let aoa = wrap_angle(delta.bearing());
    let local = rx.to_local(aoa);
    let distance = delta.norm().max(f64::MIN_POSITIVE);

    let amplitude = 10f64.powf(cfg.link.snr_db(distance) / 20.0);
    let phase = TWO_PI * rng.random::<f64>();
    let gain = Complex64::from_polar(amplitude, phase);
    let tau_frac: f64 = rng.random();

    let steering = array_response(local, &cfg.array);
    let b = element_gain(local, &cfg.pattern);
    let noise_std = std::f64::consts::FRAC_1_SQRT_2;

    let samples = (0..cfg.filter.n_samples)
        .map(|n| {
            let path = gain * b * sinc(tau_frac - n as f64);
            steering
                .iter()
                .map(|a| {
                    let mut v = path * a;
                    if cfg.noise {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        v += Complex64::new(re * noise_std, im * noise_std);
                    }
                    v
                })
                .collect()
        })
        .collect();

    Snapshot {
        samples,
        aoa,
        gain,
        tau_frac,
    }
}

/// `max_n |a(θ_i − φr)ᴴ z[n]|²` for every global grid angle `θ_i`.
pub fn correlation_spectrum(snapshot: &Snapshot, rx: &Pose2D, cfg: &SimConfig) -> Result<Vec<f64>> {
    let n_grid = cfg.filter.grid_len()?;
    let mut steering = vec![Complex64::new(0.0, 0.0); cfg.array.n_elements];
    let spectrum = (0..n_grid)
        .map(|i| {
            fill_array_response(rx.to_local(grid_angle(i, n_grid)), &cfg.array, &mut steering);
            snapshot
                .samples
                .iter()
                .map(|z| {
                    steering
                        .iter()
                        .zip(z)
                        .fold(Complex64::new(0.0, 0.0), |acc, (a, z)| acc + a.conj() * z)
                        .norm_sqr()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(spectrum)
}

// Relative tolerance under which two correlation values count as a tie.
const TIE_RTOL: f64 = 1e-12;

/// Index of the spectrum peak.
///
/// Mirror angles φ and π − φ have identical steering vectors, so exact ties
/// are common; ties go to the hypothesis closest to boresight, then to the
/// smaller grid index.
pub fn peak_index(spectrum: &[f64], rx: &Pose2D) -> usize {
    let n = spectrum.len();
    let off_boresight = |i: usize| rx.to_local(grid_angle(i, n)).abs();
    let mut best = 0;
    for (i, &c) in spectrum.iter().enumerate().skip(1) {
        let top = spectrum[best];
        let tol = TIE_RTOL * top.abs().max(f64::MIN_POSITIVE);
        if c > top + tol || ((c - top).abs() <= tol && off_boresight(i) < off_boresight(best) - 1e-12) {
            best = i;
        }
    }
    best
}

/// Angle and SNR estimates from a snapshot.
pub fn estimate(snapshot: &Snapshot, rx: &Pose2D, cfg: &SimConfig) -> Result<Observation> {
    let spectrum = correlation_spectrum(snapshot, rx, cfg)?;
    let best = peak_index(&spectrum, rx);
    Ok(Observation {
        rx: *rx,
        aoa_hat: grid_angle(best, spectrum.len()),
        snr_hat: spectrum[best],
    })
}

/// Simulates one observation of a transmitter at `tx`.
///
/// Callers guarantee the TX/RX separation is at least `cfg.min_separation`;
/// [`generate_dataset`] enforces it by resampling.
pub fn simulate_measurement<R: Rng + ?Sized>(
    tx: Point2,
    rx: &Pose2D,
    rng: &mut R,
    cfg: &SimConfig,
) -> Result<Observation> {
    let snapshot = simulate_snapshot(tx, rx, rng, cfg);
    estimate(&snapshot, rx, cfg)
}

/// One sample drawn from the stream of index `index`.
pub fn generate_sample(seed: u64, index: u64, region: &Region, cfg: &SimConfig) -> Result<Sample> {
    let mut rng = stream_rng(seed, Stream::Dataset, index);
    loop {
        let (tx, rx) = sample_geometry(&mut rng, region);
        if tx.distance(rx.position) < cfg.min_separation {
            continue;
        }
        let obs = simulate_measurement(tx, &rx, &mut rng, cfg)?;
        return Ok(Sample { tx, obs });
    }
}

/// `n` independent samples, deterministic in `seed` and independent of the
/// worker count.
pub fn generate_dataset(n: usize, seed: u64, region: &Region, cfg: &SimConfig) -> Result<Vec<Sample>> {
    region.validate()?;
    cfg.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| generate_sample(seed, i, region, cfg))
        .collect()
}
