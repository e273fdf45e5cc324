use rand::Rng;

use crate::error::{Error, Result};
use crate::scene::{Point2, Region};

/// Candidate transmitter positions for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub points: Vec<Point2>,
    /// Position of the true transmitter in `points`, when it is included.
    pub truth_index: Option<usize>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `k − 1` i.i.d. uniform positions with the truth inserted at a uniformly
/// random index.
pub fn sample_candidates<R: Rng + ?Sized>(
    rng: &mut R,
    truth: Point2,
    k: usize,
    region: &Region,
) -> Result<CandidateSet> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 candidates, got {k}")));
    }
    let truth_index = rng.random_range(0..k);
    let points = (0..k)
        .map(|i| {
            if i == truth_index {
                truth
            } else {
                region.sample_uniform(rng)
            }
        })
        .collect();
    Ok(CandidateSet {
        points,
        truth_index: Some(truth_index),
    })
}
