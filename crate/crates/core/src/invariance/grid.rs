//! The seeds x trials x axes invariance grid.

use crate::data::{stratified_split, Table};
use crate::readout::{accuracy, ProbabilityMatrix, TableClassifier};

use super::{
    agreement, apply_permutation, spread, AgreementReport, InvarianceError, PermAxis,
    PermutationTrial, Spread,
};

/// One trial's outcome with its grid coordinates.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub axis: PermAxis,
    pub seed: u64,
    pub trial: usize,
    pub report: AgreementReport,
    /// Query accuracy of the permuted run (after label un-permutation).
    pub accuracy: f64,
}

/// Aggregate over one axis.
#[derive(Debug, Clone)]
pub struct AxisSummary {
    pub axis: PermAxis,
    pub mean_abs_prob_delta: f64,
    pub max_abs_prob_delta: f64,
    pub mean_label_agreement: f64,
    pub all_within_tol: bool,
    /// Worst per-seed best/worst accuracy spread. Each seed's spread pools
    /// that seed's baseline with its permutation trials, so the split's own
    /// seed-to-seed variation never enters: an exactly invariant classifier
    /// reports 0 here.
    pub spread: Spread,
}

#[derive(Debug, Clone)]
pub struct InvarianceGridReport {
    pub outcomes: Vec<TrialOutcome>,
    pub per_axis: Vec<AxisSummary>,
    /// Per-seed baseline accuracies.
    pub baseline_accuracy: Vec<(u64, f64)>,
}

/// Run `trials_per_seed` random permutations per `(seed, axis)` cell against
/// the unpermuted baseline. Deterministic given the seed list.
pub fn invariance_grid(
    classifier: &dyn TableClassifier,
    table: &Table,
    seeds: &[u64],
    trials_per_seed: usize,
    axes: &[PermAxis],
    tolerance: f64,
) -> Result<InvarianceGridReport, InvarianceError> {
    let mut outcomes = Vec::new();
    let mut baseline_accuracy = Vec::new();

    for &seed in seeds {
        let split = stratified_split(table, seed, 0.8)?;
        let labels = table.labels().ok_or(InvarianceError::NeedsLabels)?;
        let query_labels: Vec<usize> = split.query_idx.iter().map(|&i| labels[i]).collect();
        let baseline: ProbabilityMatrix = classifier.classify(table, &split)?;
        baseline_accuracy.push((seed, accuracy(&baseline, &query_labels)));

        for &axis in axes {
            for trial_index in 0..trials_per_seed {
                let trial = PermutationTrial::random(axis, table, &split, seed, trial_index);
                let (pt, ps) = apply_permutation(table, &split, &trial)?;
                let raw =
                    classifier
                        .classify(&pt, &ps)
                        .map_err(|source| InvarianceError::Classifier {
                            axis,
                            seed,
                            trial: trial_index,
                            source,
                        })?;
                let probs = match axis {
                    PermAxis::Label => raw.permute_classes(&trial.permutation)?,
                    _ => raw,
                };
                let report = agreement(&baseline, &probs, tolerance)?;
                outcomes.push(TrialOutcome {
                    axis,
                    seed,
                    trial: trial_index,
                    report,
                    accuracy: accuracy(&probs, &query_labels),
                });
            }
        }
    }

    let per_axis = axes
        .iter()
        .map(|&axis| {
            let axis_outcomes: Vec<&TrialOutcome> =
                outcomes.iter().filter(|o| o.axis == axis).collect();
            let n = axis_outcomes.len().max(1) as f64;
            // worst within-seed spread across the trial accuracies plus that
            // seed's baseline
            let mut worst: Option<Spread> = None;
            for &(seed, base_acc) in &baseline_accuracy {
                let mut accs: Vec<f64> = axis_outcomes
                    .iter()
                    .filter(|o| o.seed == seed)
                    .map(|o| o.accuracy)
                    .collect();
                accs.push(base_acc);
                let s = spread(&accs)?;
                if worst.as_ref().is_none_or(|w| s.spread_pp > w.spread_pp) {
                    worst = Some(s);
                }
            }
            let accs: Vec<f64> = axis_outcomes.iter().map(|o| o.accuracy).collect();
            let worst = match worst {
                Some(w) => w,
                None => spread(&accs)?,
            };
            Ok(AxisSummary {
                axis,
                mean_abs_prob_delta: axis_outcomes
                    .iter()
                    .map(|o| o.report.mean_abs_prob_delta)
                    .sum::<f64>()
                    / n,
                max_abs_prob_delta: axis_outcomes
                    .iter()
                    .map(|o| o.report.max_abs_prob_delta)
                    .fold(0.0, f64::max),
                mean_label_agreement: axis_outcomes
                    .iter()
                    .map(|o| o.report.label_agreement)
                    .sum::<f64>()
                    / n,
                all_within_tol: axis_outcomes.iter().all(|o| o.report.exact_within_tol),
                spread: worst,
            })
        })
        .collect::<Result<Vec<_>, InvarianceError>>()?;

    Ok(InvarianceGridReport {
        outcomes,
        per_axis,
        baseline_accuracy,
    })
}
