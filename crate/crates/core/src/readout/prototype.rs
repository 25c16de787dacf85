//! Nearest-class-prototype readout.

use crate::data::Matrix;

use super::distance::DistanceKernel;
use super::{Metric, ProbabilityMatrix, ReadoutError};

/// Per-class centroids decoded through `softmax(-d(z, mu_c))`.
///
/// Prototypes are unweighted class means of the context representations;
/// the argmax is the nearest prototype. Only `L2` and `Cosine` apply.
pub fn prototype_classify(
    context_reps: &Matrix,
    context_labels: &[usize],
    query_reps: &Matrix,
    metric: Metric,
) -> Result<ProbabilityMatrix, ReadoutError> {
    if context_labels.len() != context_reps.n_rows() {
        return Err(ReadoutError::LabelSizeMismatch {
            labels: context_labels.len(),
            context: context_reps.n_rows(),
        });
    }
    if metric == Metric::Mahalanobis {
        return Err(ReadoutError::Shape(
            "prototype rule supports l2 and cosine only".into(),
        ));
    }
    let d = context_reps.n_cols();
    let classes = context_labels.iter().max().map_or(0, |m| m + 1);

    // order-independent centroid accumulation
    let mut prototypes = Matrix::zeros(classes, d);
    for c in 0..classes {
        let members: Vec<usize> = context_labels
            .iter()
            .enumerate()
            .filter(|(_, &y)| y == c)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            return Err(ReadoutError::EmptyClass(c));
        }
        for j in 0..d {
            let mut vals: Vec<f64> = members
                .iter()
                .map(|&i| context_reps.get(i, j))
                .collect();
            prototypes.set(c, j, crate::data::stable_sum(&mut vals) / members.len() as f64);
        }
    }

    let kernel = DistanceKernel::new(metric, context_reps)?;
    let mut probs = Matrix::zeros(query_reps.n_rows(), classes);
    for (i, z) in query_reps.rows_iter().enumerate() {
        let dists: Result<Vec<f64>, _> = (0..classes)
            .map(|c| kernel.distance(z, prototypes.row(c)))
            .collect();
        let dists = dists?;
        // softmax over negative distances, shifted for stability
        let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = dists.iter().map(|&d| (-(d - min)).exp()).collect();
        let sum: f64 = weights.iter().sum();
        for (c, w) in weights.iter().enumerate() {
            probs.set(i, c, w / sum);
        }
    }
    ProbabilityMatrix::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nearest_prototype_wins() {
        let ctx = Matrix::new(4, 2, vec![0.0, 0.0, 0.0, 0.0, 10.0, 0.0, 10.0, 0.0]).unwrap();
        let q = Matrix::new(1, 2, vec![1.0, 0.0]).unwrap();
        let p = prototype_classify(&ctx, &[0, 0, 1, 1], &q, Metric::L2).unwrap();
        assert_eq!(p.argmax(0), 0);
    }

    #[test]
    fn equidistant_query_splits_evenly() {
        let ctx = Matrix::new(2, 1, vec![-1.0, 1.0]).unwrap();
        let q = Matrix::new(1, 1, vec![0.0]).unwrap();
        let p = prototype_classify(&ctx, &[0, 1], &q, Metric::L2).unwrap();
        assert_abs_diff_eq!(p.get(0, 0), 0.5, epsilon = 1e-12);
    }

    /// Independent centroid oracle: recompute class means and the softmax by
    /// hand on a 3-class instance.
    #[test]
    fn matches_brute_force_centroid_oracle() {
        let ctx = Matrix::new(
            6,
            2,
            vec![0.0, 0.0, 2.0, 0.0, 5.0, 5.0, 7.0, 5.0, 0.0, 9.0, 2.0, 9.0],
        )
        .unwrap();
        let labels = [0, 0, 1, 1, 2, 2];
        let q = Matrix::new(2, 2, vec![1.5, 1.0, 5.5, 4.0]).unwrap();
        let p = prototype_classify(&ctx, &labels, &q, Metric::L2).unwrap();

        let mus: [[f64; 2]; 3] = [[1.0, 0.0], [6.0, 5.0], [1.0, 9.0]];
        let queries: [[f64; 2]; 2] = [[1.5, 1.0], [5.5, 4.0]];
        for (i, query) in queries.iter().enumerate() {
            let d: Vec<f64> = mus
                .iter()
                .map(|mu| ((query[0] - mu[0]).powi(2) + (query[1] - mu[1]).powi(2)).sqrt())
                .collect();
            let e: Vec<f64> = d.iter().map(|x| (-x).exp()).collect();
            let s: f64 = e.iter().sum();
            for c in 0..3 {
                assert_abs_diff_eq!(p.get(i, c), e[c] / s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn empty_class_rejected() {
        // labels must be contiguous for the rule; a class with no rows errors
        let ctx = Matrix::new(2, 1, vec![0.0, 1.0]).unwrap();
        let q = Matrix::new(1, 1, vec![0.5]).unwrap();
        assert!(matches!(
            prototype_classify(&ctx, &[0, 2], &q, Metric::L2),
            Err(ReadoutError::EmptyClass(1))
        ));
    }

    #[test]
    fn zero_norm_cosine_rejected() {
        let ctx = Matrix::new(2, 2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let q = Matrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            prototype_classify(&ctx, &[0, 1], &q, Metric::Cosine),
            Err(ReadoutError::ZeroNorm)
        ));
    }
}
