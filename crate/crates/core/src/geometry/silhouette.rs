//! Silhouette score over labeled representations.

use crate::data::Matrix;
use crate::readout::Metric;

use super::GeometryError;

#[derive(Debug, Clone, Copy)]
pub struct SilhouetteResult {
    /// Mean silhouette over all points, in `[-1, 1]`.
    pub score: f64,
    /// True when a singleton class was encountered (its points score 0).
    pub singleton_flagged: bool,
}

/// `(b_i - a_i) / max(a_i, b_i)` averaged over points: `a_i` is the mean
/// distance to the point's own class excluding itself, `b_i` the smallest
/// mean distance to any other class. Cosine is the protocol metric; `L2` is
/// accepted for diagnostics.
pub fn silhouette(
    reps: &Matrix,
    labels: &[usize],
    metric: Metric,
) -> Result<SilhouetteResult, GeometryError> {
    if labels.len() != reps.n_rows() {
        return Err(GeometryError::LabelMismatch(labels.len(), reps.n_rows()));
    }
    if metric == Metric::Mahalanobis {
        return Err(GeometryError::UnsupportedMetric("mahalanobis".into()));
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    if classes < 2 {
        return Err(GeometryError::NeedsTwoClasses);
    }
    let n = reps.n_rows();
    let dist = |a: usize, b: usize| -> Result<f64, GeometryError> {
        match metric {
            Metric::L2 => Ok(crate::readout::distance_l2(reps.row(a), reps.row(b))),
            Metric::Cosine => crate::readout::distance_cosine(reps.row(a), reps.row(b))
                .map_err(|_| GeometryError::Degenerate("zero-norm vector under cosine".into())),
            Metric::Mahalanobis => unreachable!(),
        }
    };

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }

    let mut total = 0.0;
    let mut singleton_flagged = false;
    for i in 0..n {
        let own = labels[i];
        if by_class[own].len() < 2 {
            singleton_flagged = true;
            continue; // contributes silhouette 0
        }
        let mut a = 0.0;
        for &j in &by_class[own] {
            if j != i {
                a += dist(i, j)?;
            }
        }
        a /= (by_class[own].len() - 1) as f64;

        let mut b = f64::INFINITY;
        for (c, members) in by_class.iter().enumerate() {
            if c == own || members.is_empty() {
                continue;
            }
            let mut m = 0.0;
            for &j in members {
                m += dist(i, j)?;
            }
            b = b.min(m / members.len() as f64);
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(SilhouetteResult {
        score: total / n as f64,
        singleton_flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn separated_tight_clusters_score_high() {
        let mut rng = crate::rng::cell_rng("silhouette_test", 0, "clusters");
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let c = i % 2;
            // two tight cones far apart in angle
            let base: [f64; 2] = if c == 0 { [1.0, 0.0] } else { [-1.0, 0.02] };
            rows.push(vec![
                base[0] + 0.01 * rng.random::<f64>(),
                base[1] + 0.01 * rng.random::<f64>(),
            ]);
            labels.push(c);
        }
        let r = silhouette(&Matrix::from_rows(&rows).unwrap(), &labels, Metric::Cosine).unwrap();
        assert!(r.score > 0.9, "score = {}", r.score);
    }

    #[test]
    fn shuffled_labels_on_one_blob_score_near_zero() {
        let mut rng = crate::rng::cell_rng("silhouette_test", 1, "blob");
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| vec![1.0 + 0.3 * rng.random::<f64>(), 0.3 * rng.random::<f64>()])
            .collect();
        let labels: Vec<usize> = (0..100).map(|_| usize::from(rng.random::<bool>())).collect();
        let r = silhouette(&Matrix::from_rows(&rows).unwrap(), &labels, Metric::Cosine).unwrap();
        assert!(r.score.abs() < 0.1, "score = {}", r.score);
    }

    /// Pencil-and-paper six-point case on the unit circle with cosine
    /// distance `1 - cos(angle difference)`.
    #[test]
    fn hand_computed_six_point_case() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        // class 0 at angles 0, 45, 90 degrees; class 1 at 180, 225, 270
        let rows = vec![
            vec![1.0, 0.0],
            vec![s2, s2],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![-s2, -s2],
            vec![0.0, -1.0],
        ];
        let labels = [0, 0, 0, 1, 1, 1];
        let r = silhouette(&Matrix::from_rows(&rows).unwrap(), &labels, Metric::Cosine).unwrap();

        // by symmetry three geometries repeat across the two classes:
        // outer points (0 deg): a = ((1-c45)+(1-c90))/2, b = ((1-c180)+(1-c225)+(1-c270))/3
        let c45 = s2;
        let a_outer = ((1.0 - c45) + 1.0) / 2.0;
        let b_outer = ((1.0 + 1.0) + (1.0 + c45) + 1.0) / 3.0;
        let s_outer = (b_outer - a_outer) / b_outer.max(a_outer);
        // middle points (45 deg): a = (1-c45) (both neighbors at 45)
        let a_mid = 1.0 - c45;
        let b_mid = ((1.0 + c45) + 2.0 + (1.0 + c45)) / 3.0;
        let s_mid = (b_mid - a_mid) / b_mid.max(a_mid);
        // 90-degree points mirror the outer ones
        let expected = (2.0 * s_outer * 2.0 + 2.0 * s_mid) / 6.0;
        assert_abs_diff_eq!(r.score, expected, epsilon = 1e-12);
    }

    #[test]
    fn singleton_class_flagged_not_fatal() {
        let rows = vec![vec![1.0, 0.0], vec![0.9, 0.1], vec![-1.0, 0.0]];
        let labels = [0, 0, 1];
        let r = silhouette(&Matrix::from_rows(&rows).unwrap(), &labels, Metric::Cosine).unwrap();
        assert!(r.singleton_flagged);
    }

    #[test]
    fn invariant_to_point_order_and_relabeling() {
        let mut rng = crate::rng::cell_rng("silhouette_test", 2, "perm");
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let c = if i % 2 == 0 { 2.0 } else { -2.0 };
                vec![c + rng.random::<f64>(), 1.0 + rng.random::<f64>()]
            })
            .collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 2).collect();
        let base =
            silhouette(&Matrix::from_rows(&rows).unwrap(), &labels, Metric::Cosine).unwrap();

        // reverse point order
        let rev_rows: Vec<Vec<f64>> = rows.iter().rev().cloned().collect();
        let rev_labels: Vec<usize> = labels.iter().rev().copied().collect();
        let rev = silhouette(
            &Matrix::from_rows(&rev_rows).unwrap(),
            &rev_labels,
            Metric::Cosine,
        )
        .unwrap();
        assert_abs_diff_eq!(base.score, rev.score, epsilon = 1e-12);

        // swap class indices
        let swapped: Vec<usize> = labels.iter().map(|&y| 1 - y).collect();
        let sw =
            silhouette(&Matrix::from_rows(&rows).unwrap(), &swapped, Metric::Cosine).unwrap();
        assert_abs_diff_eq!(base.score, sw.score, epsilon = 1e-12);
    }
}
