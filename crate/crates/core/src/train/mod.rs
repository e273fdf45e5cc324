//! Candidate sampling, sampled cross-entropy loss, AdamW and the training loop.

pub mod adamw;
pub mod candidates;
pub mod loss;
pub mod trainer;

pub use adamw::{adamw_step, AdamWConfig, AdamWState};
pub use candidates::{sample_candidates, CandidateSet};
pub use loss::{item_loss, log_sum_exp, sampled_cel, sampled_cel_value};
pub use trainer::{history_csv, split_indices, train, EpochRecord, TrainConfig, TrainOutcome};
