//! Prediction agreement between baseline and permuted runs.

use crate::readout::ProbabilityMatrix;

use super::InvarianceError;

/// Drift between two probability matrices over the same queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementReport {
    /// Mean absolute per-entry probability delta.
    pub mean_abs_prob_delta: f64,
    /// Largest absolute per-entry delta.
    pub max_abs_prob_delta: f64,
    /// Fraction of queries whose argmax label matches.
    pub label_agreement: f64,
    /// `max_abs_prob_delta <= tolerance` (inclusive).
    pub exact_within_tol: bool,
}

/// Compare permuted predictions (already un-permuted on the label axis)
/// against the baseline at the given tolerance.
pub fn agreement(
    base: &ProbabilityMatrix,
    permuted: &ProbabilityMatrix,
    tolerance: f64,
) -> Result<AgreementReport, InvarianceError> {
    if base.n_queries() != permuted.n_queries() || base.class_count() != permuted.class_count() {
        return Err(InvarianceError::ShapeMismatch);
    }
    let mut max_delta = 0.0f64;
    let mut sum_delta = 0.0f64;
    let entries = base.n_queries() * base.class_count();
    for i in 0..base.n_queries() {
        for c in 0..base.class_count() {
            let d = (base.get(i, c) - permuted.get(i, c)).abs();
            max_delta = max_delta.max(d);
            sum_delta += d;
        }
    }
    let agree = (0..base.n_queries())
        .filter(|&i| base.argmax(i) == permuted.argmax(i))
        .count();
    Ok(AgreementReport {
        mean_abs_prob_delta: sum_delta / entries.max(1) as f64,
        max_abs_prob_delta: max_delta,
        label_agreement: agree as f64 / base.n_queries().max(1) as f64,
        exact_within_tol: max_delta <= tolerance,
    })
}

/// Agreement reports for externally produced prediction dumps: one baseline
/// matrix against each trial matrix.
pub fn external_agreement(
    baseline: &ProbabilityMatrix,
    trials: &[ProbabilityMatrix],
    tolerance: f64,
) -> Result<Vec<AgreementReport>, InvarianceError> {
    trials
        .iter()
        .map(|t| agreement(baseline, t, tolerance))
        .collect()
}

/// Best/worst accuracy over a set of trials, spread in percentage points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub best: f64,
    pub worst: f64,
    pub spread_pp: f64,
}

pub fn spread(accuracies: &[f64]) -> Result<Spread, InvarianceError> {
    if accuracies.len() < 2 {
        return Err(InvarianceError::TooFewTrials);
    }
    let best = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = accuracies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Spread {
        best,
        worst,
        spread_pp: (best - worst) * 100.0,
    })
}
