//! Jensen–Shannon screen for columns with identical 1D marginals.

use crate::data::{ColumnKind, Matrix, Table};

use super::GeometryError;

/// Histogram bins for numeric column pairs.
pub const NUMERIC_BINS: usize = 16;

#[derive(Debug, Clone)]
pub struct MarginalScreen {
    /// Size of the largest cluster of columns with pairwise-similar marginals.
    pub max_cluster_size: usize,
    /// Greedy clusters (column indices), seeded at the lowest index.
    pub clusters: Vec<Vec<usize>>,
    /// Pairwise JS divergences (nats), symmetric with zero diagonal.
    pub pairwise_js: Matrix,
}

/// Pairwise Jensen–Shannon divergence between column marginals followed by
/// greedy thresholded clustering.
///
/// Each pair is histogrammed on shared bins: category bins when both columns
/// are categorical, otherwise [`NUMERIC_BINS`] equal-width bins over the
/// joint range of the two columns. Divergences use natural logs, so disjoint
/// supports reach `ln 2`. Clusters grow greedily: the lowest unassigned
/// column seeds a cluster and absorbs every later unassigned column within
/// `tolerance` of the seed.
pub fn js_marginal_screen(table: &Table, tolerance: f64) -> Result<MarginalScreen, GeometryError> {
    if tolerance <= 0.0 {
        return Err(GeometryError::InvalidParam(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let d = table.n_cols();
    let mut js = Matrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let v = pair_js(table, i, j);
            js.set(i, j, v);
            js.set(j, i, v);
        }
    }

    let mut assigned = vec![false; d];
    let mut clusters = Vec::new();
    for seed in 0..d {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut cluster = vec![seed];
        for j in (seed + 1)..d {
            if !assigned[j] && js.get(seed, j) <= tolerance {
                assigned[j] = true;
                cluster.push(j);
            }
        }
        clusters.push(cluster);
    }
    let max_cluster_size = clusters.iter().map(Vec::len).max().unwrap_or(0);
    Ok(MarginalScreen {
        max_cluster_size,
        clusters,
        pairwise_js: js,
    })
}

fn pair_js(table: &Table, i: usize, j: usize) -> f64 {
    let a = table.values().column(i);
    let b = table.values().column(j);
    let both_categorical = table.column_kinds()[i] == ColumnKind::Categorical
        && table.column_kinds()[j] == ColumnKind::Categorical;

    let (pa, pb) = if both_categorical {
        // category bins over the union of observed codes
        let mut codes: Vec<i64> = a.iter().chain(b.iter()).map(|&v| v as i64).collect();
        codes.sort_unstable();
        codes.dedup();
        let hist = |col: &[f64]| -> Vec<f64> {
            let mut h = vec![0.0; codes.len()];
            for &v in col {
                let idx = codes.binary_search(&(v as i64)).expect("observed code");
                h[idx] += 1.0 / col.len() as f64;
            }
            h
        };
        (hist(&a), hist(&b))
    } else {
        let lo = a
            .iter()
            .chain(b.iter())
            .copied()
            .fold(f64::INFINITY, f64::min);
        let hi = a
            .iter()
            .chain(b.iter())
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if hi == lo {
            // both columns constant at the same value: one shared bin
            return 0.0;
        }
        let width = (hi - lo) / NUMERIC_BINS as f64;
        let hist = |col: &[f64]| -> Vec<f64> {
            let mut h = vec![0.0; NUMERIC_BINS];
            for &v in col {
                let idx = (((v - lo) / width) as usize).min(NUMERIC_BINS - 1);
                h[idx] += 1.0 / col.len() as f64;
            }
            h
        };
        (hist(&a), hist(&b))
    };
    jensen_shannon(&pa, &pb)
}

/// `0.5 KL(p||m) + 0.5 KL(q||m)` with `m = (p+q)/2`, natural log.
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    let kl_half = |x: &[f64], y: &[f64]| -> f64 {
        x.iter()
            .zip(y)
            .filter(|(&px, _)| px > 0.0)
            .map(|(&px, &qx)| {
                let m = (px + qx) / 2.0;
                px * (px / m).ln()
            })
            .sum::<f64>()
    };
    0.5 * (kl_half(p, q) + kl_half(q, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticSpec};

    fn table_from_columns(cols: Vec<Vec<f64>>, kind: ColumnKind) -> Table {
        let n = cols[0].len();
        let d = cols.len();
        let mut m = Matrix::zeros(n, d);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Table::classification("t", m, vec![kind; d], (0..n).map(|i| i % 2).collect()).unwrap()
    }

    #[test]
    fn identical_columns_cluster_at_any_tolerance() {
        let col: Vec<f64> = (0..50).map(|i| (i % 7) as f64).collect();
        let t = table_from_columns(vec![col.clone(), col], ColumnKind::Categorical);
        let s = js_marginal_screen(&t, 1e-9).unwrap();
        assert_eq!(s.max_cluster_size, 2);
        assert_eq!(s.pairwise_js.get(0, 1), 0.0);
    }

    #[test]
    fn disjoint_supports_reach_ln2_and_never_cluster() {
        let a: Vec<f64> = (0..40).map(|i| (i % 4) as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| 10.0 + (i % 4) as f64).collect();
        let t = table_from_columns(vec![a, b], ColumnKind::Categorical);
        let s = js_marginal_screen(&t, 0.1).unwrap();
        assert!((s.pairwise_js.get(0, 1) - 2f64.ln()).abs() < 1e-12);
        assert_eq!(s.max_cluster_size, 1);
    }

    /// Generator-controlled oracle: an f=1 stress table has all columns on
    /// one marginal, so the screen must cluster (at least) d-1 of them.
    #[test]
    fn shared_marginal_stress_clusters_all_columns() {
        let t = generate_synthetic(
            &SyntheticSpec::new("identical_marginal_stress").with("f", 1.0),
            0,
        )
        .unwrap();
        let s = js_marginal_screen(&t, 0.05).unwrap();
        assert!(
            s.max_cluster_size >= t.n_cols() - 1,
            "cluster size {}",
            s.max_cluster_size
        );
    }

    #[test]
    fn constant_column_is_a_valid_one_bin_marginal() {
        let a = vec![3.0; 30];
        let b = vec![3.0; 30];
        let t = table_from_columns(vec![a, b], ColumnKind::Numeric);
        let s = js_marginal_screen(&t, 0.01).unwrap();
        assert_eq!(s.max_cluster_size, 2);
    }

    #[test]
    fn tolerance_must_be_positive() {
        let t = table_from_columns(vec![vec![0.0; 10], vec![1.0; 10]], ColumnKind::Numeric);
        assert!(js_marginal_screen(&t, 0.0).is_err());
    }
}
