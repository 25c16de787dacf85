//! Hard and soft k-nearest-neighbor readouts.

use rand::seq::SliceRandom;

use crate::data::Matrix;
use crate::rng::cell_rng;

use super::distance::DistanceKernel;
use super::{Metric, ProbabilityMatrix, ReadoutError};

/// Neighbor label frequencies among the `k` nearest context rows; distance
/// ties broken by the lower context index.
pub fn knn_classify(
    context_reps: &Matrix,
    context_labels: &[usize],
    query_reps: &Matrix,
    k: usize,
    metric: Metric,
) -> Result<ProbabilityMatrix, ReadoutError> {
    let n = context_reps.n_rows();
    if context_labels.len() != n {
        return Err(ReadoutError::LabelSizeMismatch {
            labels: context_labels.len(),
            context: n,
        });
    }
    if k == 0 || k > n {
        return Err(ReadoutError::KTooLarge { k, n });
    }
    let classes = context_labels.iter().max().map_or(0, |m| m + 1);
    let kernel = DistanceKernel::new(metric, context_reps)?;

    let mut probs = Matrix::zeros(query_reps.n_rows(), classes);
    for (i, z) in query_reps.rows_iter().enumerate() {
        let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n);
        for (ctx, row) in context_reps.rows_iter().enumerate() {
            dists.push((kernel.distance(z, row)?, ctx));
        }
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, ctx) in dists.iter().take(k) {
            let y = context_labels[ctx];
            probs.set(i, y, probs.get(i, y) + 1.0 / k as f64);
        }
    }
    ProbabilityMatrix::new(probs)
}

/// Result of the soft-kNN fit: predictions, the selected temperature, and a
/// degeneracy flag raised when every context distance is zero (the output is
/// then uniform).
#[derive(Debug, Clone)]
pub struct SoftKnnFit {
    pub probs: ProbabilityMatrix,
    pub temperature: f64,
    pub degenerate: bool,
}

/// Soft kNN: weights `exp(-d/T)` over all context rows, with `T` selected
/// from `temperature_grid` by accuracy on a held-out quarter of the context
/// (seed-keyed 75/25 sub-split; first grid entry wins ties).
pub fn soft_knn(
    context_reps: &Matrix,
    context_labels: &[usize],
    query_reps: &Matrix,
    metric: Metric,
    temperature_grid: &[f64],
    seed: u64,
) -> Result<SoftKnnFit, ReadoutError> {
    let n = context_reps.n_rows();
    if context_labels.len() != n {
        return Err(ReadoutError::LabelSizeMismatch {
            labels: context_labels.len(),
            context: n,
        });
    }
    if temperature_grid.is_empty() || temperature_grid.iter().any(|&t| t <= 0.0) {
        return Err(ReadoutError::BadTemperatureGrid);
    }
    let kernel = DistanceKernel::new(metric, context_reps)?;

    // Degenerate geometry: nothing to weight by.
    let mut max_dist = 0.0f64;
    for z in query_reps.rows_iter() {
        for row in context_reps.rows_iter() {
            max_dist = max_dist.max(kernel.distance(z, row)?);
        }
    }
    if max_dist == 0.0 {
        let classes = context_labels.iter().max().map_or(0, |m| m + 1);
        return Ok(SoftKnnFit {
            probs: ProbabilityMatrix::uniform(query_reps.n_rows(), classes),
            temperature: temperature_grid[0],
            degenerate: true,
        });
    }

    // 75/25 context sub-split for temperature selection.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut cell_rng("soft_knn", seed, "temperature_fold"));
    let fit_len = ((0.75 * n as f64).ceil() as usize).clamp(1, n.saturating_sub(1).max(1));
    let (fit_idx, val_idx) = order.split_at(fit_len);

    let temperature = if val_idx.is_empty() {
        temperature_grid[0]
    } else {
        let fit_reps = context_reps.select_rows(fit_idx);
        let fit_labels: Vec<usize> = fit_idx.iter().map(|&i| context_labels[i]).collect();
        let val_reps = context_reps.select_rows(val_idx);
        let mut best = (temperature_grid[0], -1.0f64);
        for &t in temperature_grid {
            let probs = weighted_vote(&kernel, &fit_reps, &fit_labels, &val_reps, t)?;
            let correct = val_idx
                .iter()
                .enumerate()
                .filter(|(row, &i)| probs.argmax(*row) == context_labels[i])
                .count();
            let acc = correct as f64 / val_idx.len() as f64;
            if acc > best.1 {
                best = (t, acc);
            }
        }
        best.0
    };

    let probs = weighted_vote(&kernel, context_reps, context_labels, query_reps, temperature)?;
    Ok(SoftKnnFit {
        probs,
        temperature,
        degenerate: false,
    })
}

/// `exp(-(d - d_min)/T)` label vote; the shift keeps sharp temperatures from
/// underflowing and cancels in the normalization.
fn weighted_vote(
    kernel: &DistanceKernel,
    context_reps: &Matrix,
    context_labels: &[usize],
    query_reps: &Matrix,
    temperature: f64,
) -> Result<ProbabilityMatrix, ReadoutError> {
    let classes = context_labels.iter().max().map_or(0, |m| m + 1);
    let mut scores = Matrix::zeros(query_reps.n_rows(), classes);
    for (i, z) in query_reps.rows_iter().enumerate() {
        let dists: Result<Vec<f64>, _> = context_reps
            .rows_iter()
            .map(|row| kernel.distance(z, row))
            .collect();
        let dists = dists?;
        let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
        for (ctx, &d) in dists.iter().enumerate() {
            let w = (-(d - min) / temperature).exp();
            let y = context_labels[ctx];
            scores.set(i, y, scores.get(i, y) + w);
        }
    }
    ProbabilityMatrix::from_scores(scores)
}
