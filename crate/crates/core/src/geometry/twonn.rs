//! TwoNN intrinsic-dimension estimate from first/second neighbor ratios.

use crate::data::Matrix;

use super::GeometryError;

/// Minimum retained points for a meaningful estimate.
pub const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy)]
pub struct TwoNnResult {
    pub id: f64,
    /// Points entering the likelihood after deduplication and trimming.
    pub used_points: usize,
    /// Exact duplicate rows dropped before estimation.
    pub dropped_duplicates: usize,
}

/// Maximum-likelihood TwoNN estimate `d = n' / sum ln(r2/r1)`.
///
/// Exact duplicate points are dropped (first occurrence kept) so `r1 > 0`
/// everywhere. `trim_fraction` optionally discards that fraction of the
/// largest `r2/r1` ratios before the likelihood; the default protocol uses 0.
pub fn twonn_intrinsic_dimension(
    reps: &Matrix,
    trim_fraction: f64,
) -> Result<TwoNnResult, GeometryError> {
    if !(0.0..1.0).contains(&trim_fraction) {
        return Err(GeometryError::InvalidParam(format!(
            "trim_fraction must lie in [0,1), got {trim_fraction}"
        )));
    }
    // drop exact duplicates
    let mut kept: Vec<usize> = Vec::new();
    'outer: for i in 0..reps.n_rows() {
        for &j in &kept {
            if reps.row(i) == reps.row(j) {
                continue 'outer;
            }
        }
        kept.push(i);
    }
    let dropped = reps.n_rows() - kept.len();
    let n = kept.len();
    if n < MIN_POINTS {
        return Err(GeometryError::TooFewPoints {
            needed: MIN_POINTS,
            got: n,
        });
    }

    let mut log_ratios = Vec::with_capacity(n);
    for (a, &i) in kept.iter().enumerate() {
        let mut r1 = f64::INFINITY;
        let mut r2 = f64::INFINITY;
        for (b, &j) in kept.iter().enumerate() {
            if a == b {
                continue;
            }
            let d = l2(reps.row(i), reps.row(j));
            if d < r1 {
                r2 = r1;
                r1 = d;
            } else if d < r2 {
                r2 = d;
            }
        }
        debug_assert!(r1 > 0.0);
        log_ratios.push((r2 / r1).ln());
    }
    log_ratios.sort_by(f64::total_cmp);
    let keep = n - ((trim_fraction * n as f64).floor() as usize);
    let kept_ratios = &log_ratios[..keep.max(1)];
    let sum: f64 = kept_ratios.iter().sum();
    if sum <= 0.0 {
        return Err(GeometryError::Degenerate(
            "all first and second neighbor distances coincide".into(),
        ));
    }
    Ok(TwoNnResult {
        id: kept_ratios.len() as f64 / sum,
        used_points: kept_ratios.len(),
        dropped_duplicates: dropped,
    })
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Known-manifold oracle: uniform square in 2D padded to 10D.
    #[test]
    fn recovers_two_for_a_planar_cloud() {
        let mut rng = crate::rng::cell_rng("twonn_test", 0, "square");
        let rows: Vec<Vec<f64>> = (0..2000)
            .map(|_| {
                let mut v = vec![0.0; 10];
                v[0] = rng.random::<f64>();
                v[1] = rng.random::<f64>();
                v
            })
            .collect();
        let r = twonn_intrinsic_dimension(&Matrix::from_rows(&rows).unwrap(), 0.0).unwrap();
        assert!(
            (1.7..=2.3).contains(&r.id),
            "planar cloud estimated at {}",
            r.id
        );
    }

    /// Known-manifold oracle: jittered 1D line.
    #[test]
    fn recovers_one_for_a_line() {
        let mut rng = crate::rng::cell_rng("twonn_test", 1, "line");
        let rows: Vec<Vec<f64>> = (0..2000)
            .map(|_| {
                vec![
                    rng.random::<f64>(),
                    1e-6 * (rng.random::<f64>() - 0.5),
                    1e-6 * (rng.random::<f64>() - 0.5),
                ]
            })
            .collect();
        let r = twonn_intrinsic_dimension(&Matrix::from_rows(&rows).unwrap(), 0.0).unwrap();
        assert!((0.8..=1.3).contains(&r.id), "line estimated at {}", r.id);
    }

    #[test]
    fn duplicates_are_dropped_and_do_not_move_the_estimate() {
        let mut rng = crate::rng::cell_rng("twonn_test", 2, "dups");
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let mut doubled = rows.clone();
        doubled.extend(rows.iter().cloned());
        let single =
            twonn_intrinsic_dimension(&Matrix::from_rows(&rows).unwrap(), 0.0).unwrap();
        let dup =
            twonn_intrinsic_dimension(&Matrix::from_rows(&doubled).unwrap(), 0.0).unwrap();
        assert_eq!(dup.dropped_duplicates, 200);
        assert_eq!(single.id, dup.id);
    }

    #[test]
    fn scale_and_rigid_motion_invariance() {
        let mut rng = crate::rng::cell_rng("twonn_test", 3, "invariance");
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let base = twonn_intrinsic_dimension(&Matrix::from_rows(&rows).unwrap(), 0.0).unwrap();
        let moved: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![7.0 * r[0] + 3.0, 7.0 * r[1] - 1.0, 7.0 * r[2] + 10.0])
            .collect();
        let m = twonn_intrinsic_dimension(&Matrix::from_rows(&moved).unwrap(), 0.0).unwrap();
        assert!((base.id - m.id).abs() < 1e-9);
    }

    #[test]
    fn too_few_points_rejected() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        assert!(matches!(
            twonn_intrinsic_dimension(&Matrix::from_rows(&rows).unwrap(), 0.0),
            Err(GeometryError::TooFewPoints { .. })
        ));
    }
}
