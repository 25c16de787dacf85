//! Spectral summaries of how activation covariance spreads across directions.

use crate::data::Matrix;

use super::GeometryError;

/// Singular values below `RANK_CUTOFF * sigma_max` are excluded from the
/// entropy so `log 0` never appears; at the scales involved this does not
/// move the summaries.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Spectrum of a mean-centered representation matrix with its two standard
/// summaries.
#[derive(Debug, Clone)]
pub struct SpectrumSummary {
    /// Descending singular values of the centered matrix.
    pub singular_values: Vec<f64>,
    /// `exp(-sum p_i ln p_i)` with `p_i = sigma_i^2 / sum sigma_j^2`.
    pub effective_rank: f64,
    /// `(sum sigma_i^2)^2 / sum sigma_i^4`.
    pub participation_ratio: f64,
    /// True when the matrix is zero after centering; both summaries are
    /// then defined as 1.
    pub degenerate: bool,
}

/// Compute the centered singular spectrum and both summaries.
pub fn spectrum_summary(reps: &Matrix) -> Result<SpectrumSummary, GeometryError> {
    let n = reps.n_rows();
    if n < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: n });
    }
    let d = reps.n_cols();
    let mut centered = reps.clone();
    let mut means = vec![0.0; d];
    for row in reps.rows_iter() {
        for (j, v) in row.iter().enumerate() {
            means[j] += v / n as f64;
        }
    }
    for i in 0..n {
        let row = centered.row_mut(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v -= means[j];
        }
    }

    let svd = centered.to_na().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));

    let sigma_max = sv.first().copied().unwrap_or(0.0);
    if sigma_max <= 0.0 {
        return Ok(SpectrumSummary {
            singular_values: sv,
            effective_rank: 1.0,
            participation_ratio: 1.0,
            degenerate: true,
        });
    }
    let kept: Vec<f64> = sv
        .iter()
        .copied()
        .filter(|&s| s > RANK_CUTOFF * sigma_max)
        .collect();
    let total_sq: f64 = kept.iter().map(|s| s * s).sum();
    let entropy: f64 = kept
        .iter()
        .map(|s| {
            let p = s * s / total_sq;
            -p * p.ln()
        })
        .sum();
    let total_quad: f64 = kept.iter().map(|s| s.powi(4)).sum();
    Ok(SpectrumSummary {
        singular_values: sv,
        effective_rank: entropy.exp(),
        participation_ratio: total_sq * total_sq / total_quad,
        degenerate: false,
    })
}

/// The exponential of the spectral entropy of the centered matrix.
pub fn effective_rank(reps: &Matrix) -> Result<f64, GeometryError> {
    Ok(spectrum_summary(reps)?.effective_rank)
}

/// The inverse-kurtosis spread of the centered spectrum.
pub fn participation_ratio(reps: &Matrix) -> Result<f64, GeometryError> {
    Ok(spectrum_summary(reps)?.participation_ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Rows `+e_i` and `-e_i` for `i < r`: centered by construction with a
    /// flat spectrum of `r` equal values.
    fn flat_spectrum_points(r: usize, dim: usize, scale: f64) -> Matrix {
        let mut rows = Vec::new();
        for i in 0..r {
            let mut plus = vec![0.0; dim];
            plus[i] = scale;
            let mut minus = vec![0.0; dim];
            minus[i] = -scale;
            rows.push(plus);
            rows.push(minus);
        }
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn flat_spectrum_gives_rank_r_exactly() {
        for r in [2usize, 5, 8] {
            let m = flat_spectrum_points(r, 10, 3.0);
            let s = spectrum_summary(&m).unwrap();
            assert_abs_diff_eq!(s.effective_rank, r as f64, epsilon = 1e-10);
            assert_abs_diff_eq!(s.participation_ratio, r as f64, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_direction_gives_one() {
        let m = Matrix::new(4, 3, vec![
            1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 2.0, 0.0, 0.0, -2.0, 0.0, 0.0,
        ])
        .unwrap();
        let s = spectrum_summary(&m).unwrap();
        assert_abs_diff_eq!(s.effective_rank, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.participation_ratio, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn pr_drops_faster_on_peaked_spectra() {
        // sigma = (10, 1, 1): PR = 144/10002 * ... compute directly
        // via points on scaled axes
        let mut rows = Vec::new();
        for (i, s) in [10.0, 1.0, 1.0].iter().enumerate() {
            let mut p = vec![0.0; 3];
            p[i] = *s;
            let mut m = vec![0.0; 3];
            m[i] = -s;
            rows.push(p);
            rows.push(m);
        }
        let m = Matrix::from_rows(&rows).unwrap();
        let s = spectrum_summary(&m).unwrap();
        assert!(s.participation_ratio < s.effective_rank);
        // closed form: PR = (100+1+1)^2/(10000+1+1)
        assert_abs_diff_eq!(
            s.participation_ratio,
            102.0 * 102.0 / 10002.0,
            epsilon = 1e-9
        );
    }

    /// Covariance-eigenvalue oracle: eigenvalues of the centered covariance
    /// are the squared singular values over n (up to scaling the summaries
    /// ignore).
    #[test]
    fn matches_covariance_eigen_oracle() {
        use rand::Rng;
        let mut rng = crate::rng::cell_rng("spectrum_test", 0, "gauss");
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..8).map(|_| rng.random::<f64>() - 0.5).collect())
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let s = spectrum_summary(&m).unwrap();

        // oracle: eigendecomposition of X_c^T X_c
        let n = 50;
        let d = 8;
        let mut means = vec![0.0; d];
        for r in &rows {
            for j in 0..d {
                means[j] += r[j] / n as f64;
            }
        }
        let mut gram = nalgebra::DMatrix::<f64>::zeros(d, d);
        for r in &rows {
            for j in 0..d {
                for k in 0..d {
                    gram[(j, k)] += (r[j] - means[j]) * (r[k] - means[k]);
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(gram);
        let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = lambdas.iter().sum();
        let entropy: f64 = lambdas
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| {
                let p = l / total;
                -p * p.ln()
            })
            .sum();
        assert_abs_diff_eq!(s.effective_rank, entropy.exp(), epsilon = 1e-8);
        let quad: f64 = lambdas.iter().map(|l| l * l).sum();
        assert_abs_diff_eq!(s.participation_ratio, total * total / quad, epsilon = 1e-8);
    }

    #[test]
    fn rotation_and_scale_invariance() {
        use rand::Rng;
        let mut rng = crate::rng::cell_rng("spectrum_test", 1, "rotation");
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..4).map(|_| rng.random::<f64>()).collect())
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let base = spectrum_summary(&m).unwrap();

        // random rotation via QR of a Gaussian matrix
        let g = nalgebra::DMatrix::from_fn(4, 4, |_, _| rng.random::<f64>() - 0.5);
        let q = g.qr().q();
        let rotated = Matrix::from_na(&(m.to_na() * q));
        let rot = spectrum_summary(&rotated).unwrap();
        assert_abs_diff_eq!(base.effective_rank, rot.effective_rank, epsilon = 1e-8);
        assert_abs_diff_eq!(
            base.participation_ratio,
            rot.participation_ratio,
            epsilon = 1e-8
        );

        let scaled_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v * 37.5).collect())
            .collect();
        let scaled = spectrum_summary(&Matrix::from_rows(&scaled_rows).unwrap()).unwrap();
        assert_abs_diff_eq!(base.effective_rank, scaled.effective_rank, epsilon = 1e-8);
    }

    #[test]
    fn zero_matrix_is_degenerate_rank_one() {
        let m = Matrix::new(3, 2, vec![5.0; 6]).unwrap();
        let s = spectrum_summary(&m).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.effective_rank, 1.0);
    }

    #[test]
    fn effective_rank_bounds() {
        use rand::Rng;
        let mut rng = crate::rng::cell_rng("spectrum_test", 2, "bounds");
        for _ in 0..5 {
            let n = 3 + (rng.random::<u32>() % 20) as usize;
            let d = 1 + (rng.random::<u32>() % 6) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
                .collect();
            let s = spectrum_summary(&Matrix::from_rows(&rows).unwrap()).unwrap();
            assert!(s.effective_rank >= 1.0 - 1e-12);
            assert!(s.effective_rank <= (n - 1).min(d) as f64 + 1e-9);
        }
    }
}
