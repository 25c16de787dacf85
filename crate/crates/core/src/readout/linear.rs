//! Multiclass logistic-regression probe.
//!
//! Minimizes the summed cross-entropy plus `(1/(2C)) ||W||^2` (intercept
//! unpenalized) by full-batch gradient descent with Armijo backtracking, so
//! the objective decreases monotonically. Iteration stops at gradient norm
//! `1e-6` or after 2000 accepted steps. Features are standardized on the
//! training fold only.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;

use crate::data::{Matrix, Standardizer};
use crate::rng::cell_rng;

use super::{ProbabilityMatrix, ReadoutError};

/// Convergence threshold on the Euclidean gradient norm.
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
/// Iteration cap.
pub const MAX_ITERATIONS: usize = 2000;

/// A fitted probe: held-out accuracy, weights, and the optimization trace.
#[derive(Debug, Clone)]
pub struct ProbeFit {
    /// Accuracy on the evaluation fold.
    pub accuracy: f64,
    /// `(D+1) x C` weights in standardized space; row 0 is the intercept.
    pub weights: Matrix,
    pub standardizer: Standardizer,
    /// Objective value after every accepted step (including the start).
    pub losses: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    /// The regularization constant `C` the fit ran with.
    pub regularization: f64,
    class_count: usize,
}

impl ProbeFit {
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Predicted class distributions for new representations.
    pub fn probabilities(&self, reps: &Matrix) -> Result<ProbabilityMatrix, ReadoutError> {
        let x = design(&self.standardizer.transform(reps));
        let w = self.weights.to_na();
        let probs = row_softmax(&(x * w));
        ProbabilityMatrix::new(Matrix::from_na(&probs))
    }

    /// Value of the training objective at arbitrary weights (test hook).
    pub fn objective_at(&self, weights: &Matrix, reps: &Matrix, labels: &[usize]) -> f64 {
        let x = design(&self.standardizer.transform(reps));
        let y = one_hot(labels, self.class_count);
        objective(&x, &y, &weights.to_na(), self.regularization)
    }
}

/// Fit the probe. When `eval` is `None`, an internal seeded 80/20 split of
/// the supplied rows provides the held-out fold.
pub fn linear_probe(
    train_reps: &Matrix,
    train_labels: &[usize],
    eval: Option<(&Matrix, &[usize])>,
    regularization: f64,
    seed: u64,
) -> Result<ProbeFit, ReadoutError> {
    if train_labels.len() != train_reps.n_rows() {
        return Err(ReadoutError::LabelSizeMismatch {
            labels: train_labels.len(),
            context: train_reps.n_rows(),
        });
    }
    if regularization <= 0.0 {
        return Err(ReadoutError::Shape("regularization must be positive".into()));
    }

    let (fit_reps, fit_labels, eval_reps, eval_labels) = match eval {
        Some((reps, labels)) => (
            train_reps.clone(),
            train_labels.to_vec(),
            reps.clone(),
            labels.to_vec(),
        ),
        None => {
            let n = train_reps.n_rows();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut cell_rng("linear_probe", seed, "train_eval_split"));
            let cut = ((0.8 * n as f64).round() as usize).clamp(1, n - 1);
            let (fit_idx, eval_idx) = order.split_at(cut);
            (
                train_reps.select_rows(fit_idx),
                fit_idx.iter().map(|&i| train_labels[i]).collect(),
                train_reps.select_rows(eval_idx),
                eval_idx.iter().map(|&i| train_labels[i]).collect(),
            )
        }
    };

    let mut distinct = fit_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(ReadoutError::SingleClassTrain);
    }
    let classes = fit_labels
        .iter()
        .chain(eval_labels.iter())
        .max()
        .map_or(0, |m| m + 1);

    let standardizer = Standardizer::fit(&fit_reps);
    let x = design(&standardizer.transform(&fit_reps));
    let y = one_hot(&fit_labels, classes);
    let p = x.ncols();

    let mut w = DMatrix::zeros(p, classes);
    let mut losses = vec![objective(&x, &y, &w, regularization)];
    let mut grad_norm = f64::INFINITY;
    let mut step = 1.0f64;
    let mut iterations = 0;

    for _ in 0..MAX_ITERATIONS {
        let g = gradient(&x, &y, &w, regularization);
        grad_norm = g.norm();
        if grad_norm <= GRADIENT_TOLERANCE {
            break;
        }
        let f0 = *losses.last().expect("seeded");
        let g2 = grad_norm * grad_norm;
        // Armijo backtracking from the last accepted step size.
        step = (step * 2.0).min(1e3);
        loop {
            let candidate = &w - &g * step;
            let f1 = objective(&x, &y, &candidate, regularization);
            if f1 <= f0 - 1e-4 * step * g2 {
                w = candidate;
                losses.push(f1);
                break;
            }
            step *= 0.5;
            if step < 1e-15 {
                // flat to machine precision; accept and stop
                losses.push(f0);
                break;
            }
        }
        iterations += 1;
        if step < 1e-15 {
            break;
        }
    }

    let fit = ProbeFit {
        accuracy: 0.0,
        weights: Matrix::from_na(&w),
        standardizer,
        losses,
        grad_norm,
        iterations,
        regularization,
        class_count: classes,
    };
    let probs = fit.probabilities(&eval_reps)?;
    let correct = eval_labels
        .iter()
        .enumerate()
        .filter(|(i, &y)| probs.argmax(*i) == y)
        .count();
    Ok(ProbeFit {
        accuracy: correct as f64 / eval_labels.len().max(1) as f64,
        ..fit
    })
}

fn design(x: &Matrix) -> DMatrix<f64> {
    let n = x.n_rows();
    let d = x.n_cols();
    DMatrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { x.get(i, j - 1) })
}

fn one_hot(labels: &[usize], classes: usize) -> DMatrix<f64> {
    let mut y = DMatrix::zeros(labels.len(), classes);
    for (i, &c) in labels.iter().enumerate() {
        y[(i, c)] = 1.0;
    }
    y
}

fn row_softmax(z: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = z.clone();
    for mut row in p.row_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    p
}

/// Summed cross-entropy plus `(1/(2C)) ||W||^2` without the intercept row.
fn objective(x: &DMatrix<f64>, y: &DMatrix<f64>, w: &DMatrix<f64>, c: f64) -> f64 {
    let z = x * w;
    let mut nll = 0.0;
    for (i, row) in z.row_iter().enumerate() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        for (cidx, &yv) in y.row(i).iter().enumerate() {
            if yv > 0.0 {
                nll += lse - row[cidx];
            }
        }
    }
    let mut reg = 0.0;
    for j in 1..w.nrows() {
        for k in 0..w.ncols() {
            reg += w[(j, k)] * w[(j, k)];
        }
    }
    nll + reg / (2.0 * c)
}

fn gradient(x: &DMatrix<f64>, y: &DMatrix<f64>, w: &DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let p = row_softmax(&(x * w));
    let mut g = x.transpose() * (p - y);
    for j in 1..w.nrows() {
        for k in 0..w.ncols() {
            g[(j, k)] += w[(j, k)] / c;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Matrix, Vec<usize>) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let c = i % 2;
            let x = if c == 0 { -2.0 } else { 2.0 };
            rows.push(vec![x + 0.1 * (i as f64 / 20.0), 0.3 * (i as f64)]);
            labels.push(c);
        }
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn separable_data_reaches_full_accuracy() {
        let (x, y) = separable();
        let fit = linear_probe(&x, &y, Some((&x, &y)), 1.0, 0).unwrap();
        assert_eq!(fit.accuracy, 1.0);
    }

    #[test]
    fn losses_decrease_monotonically() {
        let (x, y) = separable();
        let fit = linear_probe(&x, &y, None, 1.0, 0).unwrap();
        for w in fit.losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn single_class_fold_rejected() {
        let x = Matrix::new(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let y = vec![1, 1, 1, 1];
        assert!(matches!(
            linear_probe(&x, &y, Some((&x, &y)), 1.0, 0),
            Err(ReadoutError::SingleClassTrain)
        ));
    }

    #[test]
    fn chance_level_on_label_noise() {
        // labels independent of features; accuracy should hover near 0.5
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut rng = crate::rng::cell_rng("probe_test", 1, "noise");
        use rand::Rng;
        for i in 0..200 {
            rows.push(vec![rng.random::<f64>(), rng.random::<f64>()]);
            labels.push(i % 2);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let fit = linear_probe(&x, &labels, None, 1.0, 0).unwrap();
        assert!((fit.accuracy - 0.5).abs() < 0.2, "accuracy {}", fit.accuracy);
    }
}
