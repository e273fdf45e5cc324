//! Full-posterior transmitter localization from a single angle/SNR
//! measurement.
//!
//! A scoring network `g(x, y)` is trained so that `exp(g) · p₀` is
//! proportional to the posterior of the transmitter position `x` given the
//! receiver observation `y`. The partition function is never computed: each
//! training item contrasts the true position against a Monte-Carlo candidate
//! set (see [`train::sampled_cel`]).
//!
//! Modules follow the pipeline: [`scene`] geometry → [`rfsim`] measurements
//! → [`features`] → [`models`] → [`train`] → [`eval`].

pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod hashing;
pub mod models;
pub mod rfsim;
pub mod scene;
pub mod train;

pub use error::{Error, Result};
pub use features::{featurize, FeatureVector};
pub use models::{Checkpoint, CoordinateMode, Model, ModelKind};
pub use rfsim::{Observation, SimConfig};
pub use scene::{Point2, Pose2D, Region, Sample};
pub use train::{CandidateSet, TrainConfig};
