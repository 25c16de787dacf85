//! Monotone feature warps: signed cube root, soft-exponential, rank.
//!
//! Numeric columns are standardized over the stacked context-and-query rows
//! and warped in that space; categorical columns pass through. All three
//! preserve within-column order (the rank warp resolves ties by stacked row
//! index, context rows first).

use crate::data::ColumnKind;

use super::{AttackError, Instance, PoisonedInstance, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarpKind {
    Cube,
    Softexp,
    Rank,
}

/// `x -> sign(x) |x|^(1/3)`.
pub fn cube_warp_value(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// `x -> (exp(tau x) - 1) / tau`.
pub fn softexp_warp_value(x: f64, tau: f64) -> f64 {
    ((tau * x).exp() - 1.0) / tau
}

/// Within-column ranks over a stacked column, ties broken by index.
pub fn rank_warp_column(col: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..col.len()).collect();
    order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; col.len()];
    for (rank, &idx) in order.iter().enumerate() {
        ranks[idx] = rank as f64;
    }
    ranks
}

/// Apply the warp identically to context and query features.
pub fn mono_warp(
    instance: &Instance,
    kind: WarpKind,
    tau: f64,
) -> Result<PoisonedInstance, AttackError> {
    if kind == WarpKind::Softexp && tau <= 0.0 {
        return Err(AttackError::InvalidParam(format!(
            "softexp temperature must be positive, got {tau}"
        )));
    }
    let ctx = &instance.context;
    let qry = &instance.query;
    let nc = ctx.n_rows();
    let d = ctx.n_cols();
    let stacked = ctx.values().vstack(qry.values())?;
    let n = stacked.n_rows();

    let mut warped = stacked.clone();
    for j in 0..d {
        if ctx.column_kinds()[j] == ColumnKind::Categorical {
            continue;
        }
        let col = stacked.column(j);
        let out: Vec<f64> = match kind {
            WarpKind::Rank => rank_warp_column(&col),
            _ => {
                let mean: f64 = col.iter().sum::<f64>() / n as f64;
                let var: f64 =
                    col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                let std = if var > 0.0 { var.sqrt() } else { 1.0 };
                col.iter()
                    .map(|&v| {
                        let z = (v - mean) / std;
                        match kind {
                            WarpKind::Cube => cube_warp_value(z),
                            WarpKind::Softexp => softexp_warp_value(z, tau),
                            WarpKind::Rank => unreachable!(),
                        }
                    })
                    .collect()
            }
        };
        for (i, v) in out.into_iter().enumerate() {
            warped.set(i, j, v);
        }
    }

    let ctx_rows: Vec<usize> = (0..nc).collect();
    let qry_rows: Vec<usize> = (nc..n).collect();
    let new_ctx_values = warped.select_rows(&ctx_rows);
    let new_qry_values = warped.select_rows(&qry_rows);
    Ok(PoisonedInstance {
        context: ctx.with_values(new_ctx_values)?,
        query: qry.with_values(new_qry_values)?,
        provenance: Provenance::FeatureRewrite {
            original_context: ctx.values().clone(),
            original_query: qry.values().clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Matrix, Table};

    #[test]
    fn cube_root_of_eight_is_two() {
        assert_eq!(cube_warp_value(8.0), 2.0);
        assert_eq!(cube_warp_value(-8.0), -2.0);
    }

    #[test]
    fn rank_basics_and_tie_rule() {
        assert_eq!(rank_warp_column(&[3.2, 1.1, 5.0]), vec![1.0, 0.0, 2.0]);
        assert_eq!(rank_warp_column(&[2.0, 2.0]), vec![0.0, 1.0]);
    }

    fn small_instance() -> Instance {
        let ctx = Table::classification(
            "warp",
            Matrix::new(4, 2, vec![0.5, 1.0, -1.5, 2.0, 2.5, 0.0, -0.5, 1.0]).unwrap(),
            vec![ColumnKind::Numeric, ColumnKind::Categorical],
            vec![0, 1, 0, 1],
        )
        .unwrap();
        let qry = Table::classification(
            "warp",
            Matrix::new(2, 2, vec![1.5, 2.0, -2.5, 0.0]).unwrap(),
            vec![ColumnKind::Numeric, ColumnKind::Categorical],
            vec![0, 1],
        )
        .unwrap();
        Instance {
            context: ctx,
            query: qry,
        }
    }

    #[test]
    fn warps_preserve_strict_order_and_skip_categoricals() {
        let inst = small_instance();
        for kind in [WarpKind::Cube, WarpKind::Softexp, WarpKind::Rank] {
            let p = mono_warp(&inst, kind, 1.0).unwrap();
            // column 0 (numeric): order of stacked values preserved
            let mut stacked_before: Vec<f64> = inst.context.values().column(0);
            stacked_before.extend(inst.query.values().column(0));
            let mut stacked_after: Vec<f64> = p.context.values().column(0);
            stacked_after.extend(p.query.values().column(0));
            for a in 0..stacked_before.len() {
                for b in 0..stacked_before.len() {
                    if stacked_before[a] < stacked_before[b] {
                        assert!(
                            stacked_after[a] < stacked_after[b],
                            "{kind:?} broke order"
                        );
                    }
                }
            }
            // column 1 (categorical) untouched
            assert_eq!(p.context.values().column(1), inst.context.values().column(1));
            assert_eq!(p.query.values().column(1), inst.query.values().column(1));
            // labels untouched, provenance reverses
            assert_eq!(p.context.labels(), inst.context.labels());
            assert_eq!(p.un_apply().unwrap(), inst);
        }
    }

    #[test]
    fn rank_ties_follow_stacked_index_order() {
        let ctx = Table::classification(
            "ties",
            Matrix::new(2, 1, vec![2.0, 2.0]).unwrap(),
            vec![ColumnKind::Numeric],
            vec![0, 1],
        )
        .unwrap();
        let inst = Instance {
            query: ctx.select_rows(&[0]),
            context: ctx,
        };
        let p = mono_warp(&inst, WarpKind::Rank, 1.0).unwrap();
        assert_eq!(p.context.values().column(0), vec![0.0, 1.0]);
        assert_eq!(p.query.values().column(0), vec![2.0]); // third tied copy
    }
}
