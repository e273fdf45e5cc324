//! Posterior normalization, evaluation losses and metrics, entropy and
//! relative log-probability heatmaps.

pub mod heatmap;
pub mod metrics;
pub mod posterior;
pub mod scenario;
pub mod schemes;

pub use heatmap::{heatmap, PosteriorGrid};
pub use metrics::{entropy, metrics, MetricsReport};
pub use posterior::{log_posterior_from_scores, normalize_posterior, posterior_from_scores};
pub use scenario::{reference_cases, scenario_suite, ScenarioCase, ScenarioResult};
pub use schemes::{
    eval_candidates, eval_loss, evaluate, EvalScheme, GridSpec, DEFAULT_GRID_SPACING, DEFAULT_RANDOM_K,
};
