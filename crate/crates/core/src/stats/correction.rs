//! Multiple-comparison corrections: Holm, Bonferroni, Benjamini–Hochberg.

/// Holm's step-down procedure at family-wise level `alpha`.
///
/// Sorted ascending, `p_(k)` is compared against `alpha / (m - k)` for
/// zero-based rank `k`; the walk stops at the first failure.
pub fn holm(pvalues: &[f64], alpha: f64) -> Vec<bool> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let mut reject = vec![false; m];
    for (k, &idx) in order.iter().enumerate() {
        if pvalues[idx] <= alpha / (m - k) as f64 {
            reject[idx] = true;
        } else {
            break;
        }
    }
    reject
}

/// Bonferroni: `p_i <= alpha / m`.
pub fn bonferroni(pvalues: &[f64], alpha: f64) -> Vec<bool> {
    let m = pvalues.len().max(1);
    pvalues.iter().map(|&p| p <= alpha / m as f64).collect()
}

/// Benjamini–Hochberg step-up at FDR level `q`: find the largest rank `k`
/// (1-based) with `p_(k) <= q k / m` and reject everything at or below it.
pub fn bh_fdr(pvalues: &[f64], q: f64) -> Vec<bool> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let mut cutoff_rank = None;
    for (k, &idx) in order.iter().enumerate() {
        if pvalues[idx] <= q * (k + 1) as f64 / m as f64 {
            cutoff_rank = Some(k);
        }
    }
    let mut reject = vec![false; m];
    if let Some(stop) = cutoff_rank {
        for &idx in &order[..=stop] {
            reject[idx] = true;
        }
    }
    reject
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holm_rejects_all_tiny_ps() {
        assert_eq!(holm(&[0.001; 8], 0.05), vec![true; 8]);
    }

    #[test]
    fn holm_single_test_is_plain_alpha() {
        assert_eq!(holm(&[0.04], 0.05), vec![true]);
        assert_eq!(holm(&[0.06], 0.05), vec![false]);
    }

    /// Hand-stepped case: 0.01 <= 0.05/3, 0.02 <= 0.05/2, 0.04 <= 0.05/1.
    #[test]
    fn holm_hand_case() {
        assert_eq!(holm(&[0.01, 0.02, 0.04], 0.05), vec![true, true, true]);
        // breaking the chain at the second step stops everything after it
        assert_eq!(holm(&[0.01, 0.03, 0.04], 0.05), vec![true, false, false]);
    }

    /// Step-up boundary: p_(3) = 0.05 <= 0.05 * 3/3 rescues the whole set.
    #[test]
    fn bh_hand_case() {
        assert_eq!(bh_fdr(&[0.01, 0.02, 0.05], 0.05), vec![true, true, true]);
        assert_eq!(bh_fdr(&[0.06], 0.05), vec![false]);
        assert_eq!(bh_fdr(&[0.001; 30], 0.05), vec![true; 30]);
    }

    #[test]
    fn nesting_bonferroni_holm_bh() {
        // On any p-vector: Bonferroni ⊆ Holm ⊆ BH.
        let cases = [
            vec![0.001, 0.01, 0.02, 0.03, 0.2, 0.6],
            vec![0.04, 0.05, 0.06],
            vec![0.012, 0.025, 0.026, 0.04],
        ];
        for ps in &cases {
            let b = bonferroni(ps, 0.05);
            let h = holm(ps, 0.05);
            let f = bh_fdr(ps, 0.05);
            for i in 0..ps.len() {
                assert!(!b[i] || h[i], "bonferroni ⊄ holm on {ps:?}");
                assert!(!h[i] || f[i], "holm ⊄ bh on {ps:?}");
            }
        }
    }
}
