//! Search region, uniform prior and reproducible geometry generation.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rfsim::Observation;

pub const TWO_PI: f64 = 2.0 * PI;

/// A point (or displacement) in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Bearing of the vector, radians in [-π, π].
    pub fn bearing(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Wraps an angle into [-π, π).
pub fn wrap_angle(a: f64) -> f64 {
    if (-PI..PI).contains(&a) {
        return a;
    }
    let mut w = (a + PI).rem_euclid(TWO_PI) - PI;
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= PI {
        w -= TWO_PI;
    }
    w
}

/// Axis-aligned rectangular search region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Region {
    fn default() -> Self {
        Self::square(100.0)
    }
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let r = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        r.validate()?;
        Ok(r)
    }

    /// `[0, side] x [0, side]`.
    pub fn square(side: f64) -> Self {
        Self {
            x_min: 0.0,
            x_max: side,
            y_min: 0.0,
            y_max: side,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(Error::Config(format!("degenerate region {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Point2::new(
            self.x_min + u * self.width(),
            self.y_min + v * self.height(),
        )
    }
}

/// Receiver pose: position plus heading in [-π, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub position: Point2,
    heading: f64,
}

impl Pose2D {
    pub fn new(position: Point2, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    /// Angle of a global bearing as seen in the receiver's frame.
    pub fn to_local(&self, global: f64) -> f64 {
        wrap_angle(global - self.heading)
    }
}

/// A training or evaluation pair: true transmitter location and the
/// measurement it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub tx: Point2,
    pub obs: Observation,
}

/// Uniform prior density over the region (1/m²).
pub fn prior_density(x: Point2, region: &Region) -> f64 {
    if region.contains(x) {
        1.0 / region.area()
    } else {
        0.0
    }
}

/// Draws an i.i.d. uniform transmitter and receiver pose.
pub fn sample_geometry<R: Rng + ?Sized>(rng: &mut R, region: &Region) -> (Point2, Pose2D) {
    let tx = region.sample_uniform(rng);
    let rx = region.sample_uniform(rng);
    let heading = -PI + TWO_PI * rng.random::<f64>();
    (tx, Pose2D::new(rx, heading))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose tags that keep the random streams of different pipeline stages apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Dataset = 1,
    Split = 2,
    Init = 3,
    Shuffle = 4,
    TrainCandidates = 5,
    ValCandidates = 6,
    EvalCandidates = 7,
    Scenario = 8,
}

/// Independent ChaCha stream for `(seed, purpose, index)`.
///
/// The key depends on seed and purpose, the stream id on the index, so any
/// index can be generated on any worker without touching its neighbours.
pub fn stream_rng(seed: u64, purpose: Stream, index: u64) -> ChaCha8Rng {
    let k0 = splitmix64(seed ^ splitmix64(purpose as u64));
    let mut key = [0u8; 32];
    let mut state = k0;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
