//! Distance metrics over representation rows.

use nalgebra::DMatrix;

use crate::data::{stable_sum, Matrix};

use super::ReadoutError;

/// Distance used by neighbor and prototype rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    L2,
    Cosine,
    /// Mahalanobis with the shrunk context covariance
    /// `Sigma + gamma I`, `gamma = 1e-3 * trace(Sigma) / D`.
    Mahalanobis,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::L2 => "l2",
            Metric::Cosine => "cosine",
            Metric::Mahalanobis => "mahalanobis",
        }
    }
}

/// Shrinkage factor applied to the Mahalanobis covariance.
pub const MAHALANOBIS_SHRINKAGE: f64 = 1e-3;

/// A metric plus whatever state it needs (the precision matrix for
/// Mahalanobis, estimated once from the context rows).
pub struct DistanceKernel {
    metric: Metric,
    precision: Option<DMatrix<f64>>,
}

impl DistanceKernel {
    pub fn new(metric: Metric, context: &Matrix) -> Result<Self, ReadoutError> {
        let precision = match metric {
            Metric::Mahalanobis => Some(shrunk_precision(context)?),
            _ => None,
        };
        Ok(Self { metric, precision })
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64, ReadoutError> {
        match self.metric {
            Metric::L2 => Ok(l2(a, b)),
            Metric::Cosine => cosine(a, b),
            Metric::Mahalanobis => {
                let p = self.precision.as_ref().expect("precision precomputed");
                let d = DMatrix::from_fn(a.len(), 1, |i, _| a[i] - b[i]);
                let q = (d.transpose() * p * &d)[(0, 0)];
                Ok(q.max(0.0).sqrt())
            }
        }
    }
}

// Both distances accumulate their per-coordinate terms order-independently
// (sorted before summation) so column permutations cannot move them by even
// one ulp.

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    let mut terms: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    stable_sum(&mut terms).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, ReadoutError> {
    let mut dots: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut sqa: Vec<f64> = a.iter().map(|x| x * x).collect();
    let mut sqb: Vec<f64> = b.iter().map(|x| x * x).collect();
    let dot = stable_sum(&mut dots);
    let na = stable_sum(&mut sqa).sqrt();
    let nb = stable_sum(&mut sqb).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(ReadoutError::ZeroNorm);
    }
    Ok(1.0 - dot / (na * nb))
}

fn shrunk_precision(context: &Matrix) -> Result<DMatrix<f64>, ReadoutError> {
    let n = context.n_rows();
    let d = context.n_cols();
    if n == 0 {
        return Err(ReadoutError::Shape("empty context".into()));
    }
    let mut means = vec![0.0; d];
    for row in context.rows_iter() {
        for (j, v) in row.iter().enumerate() {
            means[j] += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut cov = DMatrix::zeros(d, d);
    for row in context.rows_iter() {
        for j in 0..d {
            for k in 0..d {
                cov[(j, k)] += (row[j] - means[j]) * (row[k] - means[k]);
            }
        }
    }
    cov /= n as f64;
    let gamma = MAHALANOBIS_SHRINKAGE * cov.trace() / d as f64;
    for j in 0..d {
        cov[(j, j)] += gamma;
    }
    cov.clone()
        .cholesky()
        .map(|ch| ch.inverse())
        .ok_or(ReadoutError::SingularCovariance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn l2_and_cosine_basics() {
        assert_abs_diff_eq!(l2(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_abs_diff_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(cosine(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 0.0, epsilon = 1e-12);
        assert!(cosine(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn mahalanobis_whitens_scale() {
        // Context stretched along x: unit steps in x count for less.
        let ctx = Matrix::new(
            6,
            2,
            vec![
                -10.0, -1.0, -6.0, 1.0, -2.0, -1.0, 2.0, 1.0, 6.0, -1.0, 10.0, 1.0,
            ],
        )
        .unwrap();
        let k = DistanceKernel::new(Metric::Mahalanobis, &ctx).unwrap();
        let dx = k.distance(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        let dy = k.distance(&[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(dx < dy, "stretched axis should shrink: {dx} vs {dy}");
    }
}
