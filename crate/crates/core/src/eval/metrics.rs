use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric improvement `e^{−L}` and gap-closure ratio `−L / ln K` in percent.
pub fn metrics(loss: f64, k: usize) -> (f64, f64) {
    ((-loss).exp(), -loss / (k as f64).ln() * 100.0)
}

/// Natural-log Shannon entropy with `0 · ln 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if let Some(bad) = p.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::Probability(format!("entry {bad} is not a probability")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Probability(format!("entries sum to {total}")));
    }
    Ok(-p
        .iter()
        .filter(|v| **v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>())
}

/// Loss, derived metrics and posterior-entropy summary for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scheme: String,
    pub k: usize,
    pub n_samples: usize,
    pub loss: f64,
    pub geometric_improvement: f64,
    pub gap_closure_pct: f64,
    pub entropy_mean: f64,
    pub entropy_std: f64,
}

impl MetricsReport {
    pub fn new(scheme: &str, k: usize, loss: f64, entropies: &[f64]) -> Self {
        let (g, r) = metrics(loss, k);
        let n = entropies.len().max(1) as f64;
        let mean = entropies.iter().sum::<f64>() / n;
        let var = entropies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
        Self {
            scheme: scheme.to_string(),
            k,
            n_samples: entropies.len(),
            loss,
            geometric_improvement: g,
            gap_closure_pct: r,
            entropy_mean: mean,
            entropy_std: var.sqrt(),
        }
    }
}
