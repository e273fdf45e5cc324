//! Relative log-probability maps `L(x_k) = log(p_k · K_grid)`.

use std::fmt::Write as _;

use super::metrics::entropy;
use super::posterior::log_posterior_from_scores;
use super::schemes::GridSpec;
use crate::error::Result;
use crate::models::Model;
use crate::rfsim::Observation;
use crate::scene::{prior_density, Point2, Region};

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    pub grid: GridSpec,
    /// Row-major (`y` outer), `nx · ny` values.
    pub log_relative: Vec<f64>,
}

impl PosteriorGrid {
    pub fn origin(&self) -> Point2 {
        self.grid.origin
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.k() as f64;
        self.log_relative.iter().map(|l| l.exp() / k).collect()
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy(&self.probabilities())
    }

    /// Grid point with the largest relative log-probability (first on ties).
    pub fn argmax(&self) -> Point2 {
        let mut best = 0;
        for (i, v) in self.log_relative.iter().enumerate() {
            if *v > self.log_relative[best] {
                best = i;
            }
        }
        self.grid.point(best % self.grid.nx, best / self.grid.nx)
    }

    /// CSV rendering: `#` metadata lines, then one row per `y` index.
    pub fn to_csv(&self, meta: &[(&str, String)]) -> String {
        let mut out = String::from("# relative log-probability L = log(p * K)\n");
        if !meta.is_empty() {
            let fields: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "# {}", fields.join(","));
        }
        let _ = writeln!(
            out,
            "# origin_x={},origin_y={},spacing={},nx={},ny={}",
            self.grid.origin.x, self.grid.origin.y, self.grid.spacing, self.grid.nx, self.grid.ny
        );
        for row in self.log_relative.chunks(self.grid.nx) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Binary PPM (P6), top row = largest `y`, black → red → yellow → white
    /// ramp over the finite value range.
    pub fn to_ppm(&self) -> Vec<u8> {
        let finite = self.log_relative.iter().filter(|v| v.is_finite());
        let lo = finite.clone().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let mut out = format!("P6\n{} {}\n255\n", self.grid.nx, self.grid.ny).into_bytes();
        for row in self.log_relative.chunks(self.grid.nx).rev() {
            for v in row {
                let t = if v.is_finite() { ((v - lo) / span).clamp(0.0, 1.0) } else { 0.0 };
                out.extend_from_slice(&colormap(t));
            }
        }
        out
    }
}

fn colormap(t: f64) -> [u8; 3] {
    let c = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    [c(3.0 * t), c(3.0 * t - 1.0), c(3.0 * t - 2.0)]
}

/// Posterior over a regular grid, expressed relative to the uniform density.
pub fn heatmap(model: &Model, obs: &Observation, region: &Region, spacing: f64) -> Result<PosteriorGrid> {
    let grid = GridSpec::new(region, spacing)?;
    let points = grid.points();
    let scores = model.score_points(obs, &points)?;
    let log_prior: Vec<f64> = points.iter().map(|&p| prior_density(p, region).ln()).collect();
    let ln_k = (grid.len() as f64).ln();
    let log_relative = log_posterior_from_scores(&scores, &log_prior)?
        .into_iter()
        .map(|lp| lp + ln_k)
        .collect();
    Ok(PosteriorGrid { grid, log_relative })
}
