//! Correlation coefficients and Cohen's kappa.

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

/// Pearson or Spearman correlation. Zero variance in either argument is an
/// error the caller reports as a missing value.
pub fn correlation(x: &[f64], y: &[f64], kind: CorrelationKind) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: x.len(),
        });
    }
    match kind {
        CorrelationKind::Pearson => pearson(x, y),
        CorrelationKind::Spearman => pearson(&average_ranks(x), &average_ranks(y)),
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// 1-based ranks with ties averaged.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Cohen's kappa with its degeneracy flag.
#[derive(Debug, Clone, Copy)]
pub struct KappaResult {
    pub kappa: f64,
    /// True when expected agreement is 1 (both raters constant and equal);
    /// kappa is then defined as 1.
    pub degenerate: bool,
}

/// `(p_o - p_e) / (1 - p_e)` with marginal-product expected agreement.
pub fn cohen_kappa(labels_a: &[usize], labels_b: &[usize]) -> Result<KappaResult, StatsError> {
    if labels_a.len() != labels_b.len() {
        return Err(StatsError::LengthMismatch(labels_a.len(), labels_b.len()));
    }
    let n = labels_a.len();
    if n == 0 {
        return Err(StatsError::Empty);
    }
    let classes = labels_a
        .iter()
        .chain(labels_b.iter())
        .max()
        .map_or(0, |m| m + 1);
    let mut marg_a = vec![0.0; classes];
    let mut marg_b = vec![0.0; classes];
    let mut agree = 0.0;
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        marg_a[a] += 1.0 / n as f64;
        marg_b[b] += 1.0 / n as f64;
        if a == b {
            agree += 1.0 / n as f64;
        }
    }
    let p_e: f64 = marg_a.iter().zip(&marg_b).map(|(a, b)| a * b).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(KappaResult {
            kappa: 1.0,
            degenerate: true,
        });
    }
    Ok(KappaResult {
        kappa: (agree - p_e) / (1.0 - p_e),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_map_has_unit_pearson() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_abs_diff_eq!(
            correlation(&x, &y, CorrelationKind::Pearson).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn monotone_nonlinear_separates_the_two_kinds() {
        let x: [f64; 6] = [-2.0, -1.0, 0.5, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
        let s = correlation(&x, &y, CorrelationKind::Spearman).unwrap();
        let p = correlation(&x, &y, CorrelationKind::Pearson).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        assert!(p < 1.0);
    }

    /// Hand-computed eight-point case.
    #[test]
    fn pearson_hand_case() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0, 8.0, 7.0];
        // means 4.5; sxy = 38, sxx = 42, syy = 42 -> r = 38/42
        assert_abs_diff_eq!(
            correlation(&x, &y, CorrelationKind::Pearson).unwrap(),
            38.0 / 42.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn spearman_invariant_to_monotone_transforms() {
        let x = [0.3, 1.2, 0.7, 2.9, 2.0];
        let y = [1.0, 5.0, 2.0, 9.0, 7.0];
        let base = correlation(&x, &y, CorrelationKind::Spearman).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let ty: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let t = correlation(&tx, &ty, CorrelationKind::Spearman).unwrap();
        assert_abs_diff_eq!(base, t, epsilon = 1e-12);
    }

    #[test]
    fn zero_variance_flagged() {
        assert!(matches!(
            correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], CorrelationKind::Pearson),
            Err(StatsError::ZeroVariance)
        ));
    }

    #[test]
    fn kappa_identity_and_confusion_cases() {
        let a = [0, 1, 0, 1, 1];
        assert_eq!(cohen_kappa(&a, &a).unwrap().kappa, 1.0);

        // confusion [[20, 5], [10, 15]]: p_o = 0.7, p_e = 0.5, kappa = 0.4
        let mut ra = Vec::new();
        let mut rb = Vec::new();
        for (a, b, k) in [(0, 0, 20), (0, 1, 5), (1, 0, 10), (1, 1, 15)] {
            for _ in 0..k {
                ra.push(a);
                rb.push(b);
            }
        }
        let r = cohen_kappa(&ra, &rb).unwrap();
        assert_abs_diff_eq!(r.kappa, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn kappa_is_symmetric() {
        let a = [0, 1, 2, 1, 0, 2, 2, 1];
        let b = [0, 1, 1, 1, 2, 2, 0, 1];
        assert_abs_diff_eq!(
            cohen_kappa(&a, &b).unwrap().kappa,
            cohen_kappa(&b, &a).unwrap().kappa,
            epsilon = 1e-15
        );
    }

    #[test]
    fn constant_equal_raters_are_degenerate() {
        let r = cohen_kappa(&[0, 0, 0], &[0, 0, 0]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.kappa, 1.0);
    }
}
