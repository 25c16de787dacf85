//! Closed-form ridge regression, also usable as a one-hot classifier.
//!
//! `W = (X^T X + lambda I)^{-1} X^T Yc` on standardized features with an
//! unpenalized intercept (the target mean). Classification encodes labels
//! one-hot and predicts the argmax output. The fitted weight matrix is
//! exposed because the null-space attack projects onto its kernel.

use nalgebra::DMatrix;

use crate::data::{Matrix, Standardizer};

use super::{ProbabilityMatrix, ReadoutError};

/// Targets for the ridge fit.
#[derive(Debug, Clone, Copy)]
pub enum RidgeTargets<'a> {
    /// Class indices, one-hot encoded internally.
    Labels(&'a [usize]),
    /// Real-valued regression targets.
    Reals(&'a [f64]),
}

/// A fitted ridge model in standardized feature space.
#[derive(Debug, Clone)]
pub struct RidgeModel {
    /// `d x C` weights applied to standardized features.
    weights: Matrix,
    intercept: Vec<f64>,
    standardizer: Standardizer,
    /// `Some(C)` when fitted on labels.
    class_count: Option<usize>,
    pub lambda: f64,
}

pub fn ridge_fit(
    context_x: &Matrix,
    targets: RidgeTargets<'_>,
    lambda: f64,
) -> Result<RidgeModel, ReadoutError> {
    if lambda <= 0.0 {
        return Err(ReadoutError::Shape("lambda must be positive".into()));
    }
    let n = context_x.n_rows();
    let d = context_x.n_cols();
    let (y, class_count) = match targets {
        RidgeTargets::Labels(labels) => {
            if labels.len() != n {
                return Err(ReadoutError::LabelSizeMismatch {
                    labels: labels.len(),
                    context: n,
                });
            }
            let c = labels.iter().max().map_or(0, |m| m + 1);
            let mut y = DMatrix::zeros(n, c);
            for (i, &l) in labels.iter().enumerate() {
                y[(i, l)] = 1.0;
            }
            (y, Some(c))
        }
        RidgeTargets::Reals(t) => {
            if t.len() != n {
                return Err(ReadoutError::LabelSizeMismatch {
                    labels: t.len(),
                    context: n,
                });
            }
            (DMatrix::from_column_slice(n, 1, t), None)
        }
    };

    let standardizer = Standardizer::fit(context_x);
    let x = standardizer.transform(context_x).to_na();
    let intercept: Vec<f64> = y.column_iter().map(|c| c.mean()).collect();
    let mut yc = y;
    for (mut col, &m) in yc.column_iter_mut().zip(&intercept) {
        col.add_scalar_mut(-m);
    }

    let mut gram = x.transpose() * &x;
    for i in 0..d {
        gram[(i, i)] += lambda;
    }
    let rhs = x.transpose() * yc;
    let solved = gram
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .ok_or(ReadoutError::SingularCovariance)?;

    Ok(RidgeModel {
        weights: Matrix::from_na(&solved),
        intercept,
        standardizer,
        class_count,
        lambda,
    })
}

impl RidgeModel {
    /// Raw linear outputs (one column per class / target).
    pub fn logits(&self, x: &Matrix) -> Matrix {
        let xs = self.standardizer.transform(x).to_na();
        let mut z = xs * self.weights.to_na();
        for (mut col, &b) in z.column_iter_mut().zip(&self.intercept) {
            col.add_scalar_mut(b);
        }
        Matrix::from_na(&z)
    }

    /// Logits computed directly on already-standardized features.
    pub fn logits_standardized(&self, xs: &Matrix) -> Matrix {
        let mut z = xs.to_na() * self.weights.to_na();
        for (mut col, &b) in z.column_iter_mut().zip(&self.intercept) {
            col.add_scalar_mut(b);
        }
        Matrix::from_na(&z)
    }

    pub fn predict_classes(&self, x: &Matrix) -> Vec<usize> {
        let z = self.logits(x);
        (0..z.n_rows())
            .map(|i| {
                let row = z.row(i);
                let mut best = 0;
                for (c, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    pub fn predict_reals(&self, x: &Matrix) -> Vec<f64> {
        self.logits(x).column(0)
    }

    /// Softmax of the logits: the fixed soft target the null-space attack
    /// ascends against.
    pub fn soft_probs(&self, x: &Matrix) -> Result<ProbabilityMatrix, ReadoutError> {
        let z = self.logits(x);
        let mut scores = Matrix::zeros(z.n_rows(), z.n_cols());
        for i in 0..z.n_rows() {
            let row = z.row(i);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (c, &v) in row.iter().enumerate() {
                scores.set(i, c, (v - max).exp());
            }
        }
        ProbabilityMatrix::from_scores(scores)
    }

    /// Weight matrix in standardized space (`d x C`).
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn class_count(&self) -> Option<usize> {
        self.class_count
    }

    /// Coefficients mapped back to raw feature units.
    pub fn raw_coefficients(&self) -> Matrix {
        let mut raw = self.weights.clone();
        for j in 0..raw.n_rows() {
            let s = self.standardizer.stds[j];
            for c in 0..raw.n_cols() {
                raw.set(j, c, raw.get(j, c) / s);
            }
        }
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_linear_map_at_tiny_lambda() {
        let x = Matrix::new(5, 1, vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        let y: Vec<f64> = x.column(0).iter().map(|v| 2.0 * v).collect();
        let model = ridge_fit(&x, RidgeTargets::Reals(&y), 1e-8).unwrap();
        assert_abs_diff_eq!(model.raw_coefficients().get(0, 0), 2.0, epsilon = 1e-6);
        let preds = model.predict_reals(&Matrix::new(2, 1, vec![3.0, -4.0]).unwrap());
        assert_abs_diff_eq!(preds[0], 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(preds[1], -8.0, epsilon = 1e-6);
    }

    #[test]
    fn infinite_shrinkage_predicts_the_mean() {
        let x = Matrix::new(4, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = [1.0, 3.0, 5.0, 7.0];
        let model = ridge_fit(&x, RidgeTargets::Reals(&y), 1e12).unwrap();
        assert!(model.weights().get(0, 0).abs() < 1e-9);
        let preds = model.predict_reals(&Matrix::new(1, 1, vec![100.0]).unwrap());
        assert_abs_diff_eq!(preds[0], 4.0, epsilon = 1e-6);
    }

    /// Dense-solve oracle: explicit Gaussian elimination of the normal
    /// equations on a small random system.
    #[test]
    fn matches_hand_rolled_normal_equation_solve() {
        use rand::Rng;
        let mut rng = crate::rng::cell_rng("ridge_test", 0, "system");
        let n = 5;
        let d = 3;
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            rows.push((0..d).map(|_| rng.random::<f64>() - 0.5).collect::<Vec<_>>());
            y.push(rng.random::<f64>());
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let lambda = 0.37;
        let model = ridge_fit(&x, RidgeTargets::Reals(&y), lambda).unwrap();

        // oracle on standardized x with centered y
        let s = Standardizer::fit(&x);
        let xs = s.transform(&x);
        let ybar: f64 = y.iter().sum::<f64>() / n as f64;
        let mut a = vec![vec![0.0; d + 1]; d];
        for j in 0..d {
            for k in 0..d {
                let mut v = 0.0;
                for i in 0..n {
                    v += xs.get(i, j) * xs.get(i, k);
                }
                a[j][k] = v + if j == k { lambda } else { 0.0 };
            }
            let mut b = 0.0;
            for i in 0..n {
                b += xs.get(i, j) * (y[i] - ybar);
            }
            a[j][d] = b;
        }
        // Gaussian elimination with partial pivoting
        for col in 0..d {
            let piv = (col..d)
                .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in (col + 1)..d {
                let f = a[r][col] / a[col][col];
                for k in col..=d {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
        let mut w = vec![0.0; d];
        for r in (0..d).rev() {
            let mut v = a[r][d];
            for k in (r + 1)..d {
                v -= a[r][k] * w[k];
            }
            w[r] = v / a[r][r];
        }
        for j in 0..d {
            assert_abs_diff_eq!(model.weights().get(j, 0), w[j], epsilon = 1e-10);
        }
    }

    #[test]
    fn classification_argmax_over_one_hot_outputs() {
        let x = Matrix::new(6, 1, vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]).unwrap();
        let labels = [0, 0, 0, 1, 1, 1];
        let model = ridge_fit(&x, RidgeTargets::Labels(&labels), 1e-6).unwrap();
        let preds = model.predict_classes(&Matrix::new(2, 1, vec![-2.5, 2.5]).unwrap());
        assert_eq!(preds, vec![0, 1]);
    }
}
