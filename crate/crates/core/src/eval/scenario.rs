//! Fixed receiver/transmitter geometries for posterior visualization.
//!
//! A case gives the transmitter offset from the receiver, `(dx, dy)`, and the
//! receiver heading. With heading 0 (facing +x), positive `dx` puts the
//! transmitter in front of the receiver and negative `dx` behind it.

use serde::{Deserialize, Serialize};

use super::heatmap::{heatmap, PosteriorGrid};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::rfsim::{simulate_measurement, Observation, SimConfig};
use crate::scene::{stream_rng, Point2, Pose2D, Region, Stream};

/// Horizontal offsets swept for each row, meters.
pub const SWEEP_DX: [f64; 5] = [-80.0, -50.0, 0.0, 50.0, 80.0];
/// Vertical offsets of the two reference rows, meters (heading 0° for both).
pub const SWEEP_DY: [f64; 2] = [10.0, 50.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCase {
    pub dx: f64,
    pub dy: f64,
    pub heading_deg: f64,
}

impl ScenarioCase {
    pub fn new(dx: f64, dy: f64, heading_deg: f64) -> Self {
        Self { dx, dy, heading_deg }
    }

    /// Parses `"dx,dy,heading_deg"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("bad geometry '{spec}': expected dx,dy,heading_deg")))?;
        match nums.as_slice() {
            [dx, dy, h] if nums.iter().all(|v| v.is_finite()) => Ok(Self::new(*dx, *dy, *h)),
            _ => Err(Error::Config(format!(
                "bad geometry '{spec}': expected dx,dy,heading_deg"
            ))),
        }
    }

    /// Transmitter and receiver placed symmetrically about the region centre.
    pub fn geometry(&self, region: &Region) -> Result<(Point2, Pose2D)> {
        let c = region.center();
        let half = Point2::new(0.5 * self.dx, 0.5 * self.dy);
        let tx = c + half;
        let rx = c - half;
        if !region.contains(tx) || !region.contains(rx) {
            return Err(Error::Config(format!(
                "geometry dx={} dy={} does not fit in the region",
                self.dx, self.dy
            )));
        }
        if tx.distance(rx) < 1.0 {
            return Err(Error::Config("transmitter and receiver closer than 1 m".into()));
        }
        Ok((tx, Pose2D::new(rx, self.heading_deg.to_radians())))
    }

    /// File-name stem, e.g. `dx-80_dy10_h0`.
    pub fn file_stem(&self) -> String {
        format!("dx{}_dy{}_h{}", self.dx, self.dy, self.heading_deg)
    }

    /// Simulated observation for this case under `(seed, index)`.
    pub fn observe(
        &self,
        region: &Region,
        sim: &SimConfig,
        seed: u64,
        index: u64,
    ) -> Result<(Point2, Observation)> {
        let (tx, rx) = self.geometry(region)?;
        let mut rng = stream_rng(seed, Stream::Scenario, index);
        Ok((tx, simulate_measurement(tx, &rx, &mut rng, sim)?))
    }
}

/// The two reference rows crossed with the five horizontal offsets.
pub fn reference_cases() -> Vec<ScenarioCase> {
    SWEEP_DY
        .iter()
        .flat_map(|&dy| SWEEP_DX.iter().map(move |&dx| ScenarioCase::new(dx, dy, 0.0)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub case: ScenarioCase,
    pub tx: Point2,
    pub obs: Observation,
    pub grid: PosteriorGrid,
}

/// Heatmaps for each case, with one fresh simulated observation per case.
pub fn scenario_suite(
    model: &Model,
    cases: &[ScenarioCase],
    region: &Region,
    spacing: f64,
    sim: &SimConfig,
    seed: u64,
) -> Result<Vec<ScenarioResult>> {
    cases
        .iter()
        .enumerate()
        .map(|(i, case)| {
            let (tx, obs) = case.observe(region, sim, seed, i as u64)?;
            let grid = heatmap(model, &obs, region, spacing)?;
            Ok(ScenarioResult {
                case: *case,
                tx,
                obs,
                grid,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_reference_cases_fit() {
        let cases = reference_cases();
        assert_eq!(cases.len(), 10);
        let r = Region::default();
        for c in &cases {
            let (tx, rx) = c.geometry(&r).unwrap();
            assert_eq!(tx - rx.position, Point2::new(c.dx, c.dy));
        }
    }

    #[test]
    fn parse_geometry() {
        assert_eq!(ScenarioCase::parse("50, 10, 0").unwrap(), ScenarioCase::new(50.0, 10.0, 0.0));
        assert!(ScenarioCase::parse("50,10").is_err());
        assert!(ScenarioCase::parse("a,b,c").is_err());
        assert!(ScenarioCase::parse("1,2,inf").is_err());
        assert!(ScenarioCase::new(150.0, 0.0, 0.0).geometry(&Region::default()).is_err());
    }

    #[test]
    fn empty_suite() {
        let out = scenario_suite(
            &Model::constant(0.0),
            &[],
            &Region::default(),
            10.0,
            &SimConfig::default(),
            1,
        )
        .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn first_row_case_is_finite() {
        let out = scenario_suite(
            &Model::init(crate::models::ModelKind::Mccle, 2),
            &[ScenarioCase::new(0.0, 10.0, 0.0)],
            &Region::default(),
            100.0 / 30.0,
            &SimConfig::default(),
            1,
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].grid.log_relative.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn file_stems() {
        assert_eq!(ScenarioCase::new(-80.0, 10.0, 0.0).file_stem(), "dx-80_dy10_h0");
    }
}
