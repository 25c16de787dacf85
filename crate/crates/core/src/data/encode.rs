//! Deterministic ordinal encoding and imputation.

use super::{ColumnKind, DataError, Table};

/// Ordinal-encode categorical columns and impute missing cells.
///
/// Categorical columns are re-coded so that sorted distinct values map to
/// `0..K` — sorted original strings where the column came from text, sorted
/// numeric codes otherwise — which removes any dependence on row order.
/// Missing numerics take the column median (mean of the two middle values for
/// even counts); missing categoricals take the mode, ties resolved to the
/// smallest code. The operation is idempotent.
pub fn encode_and_impute(t: &Table) -> Result<Table, DataError> {
    let n = t.n_rows();
    let d = t.n_cols();
    let mut out = t.clone();
    let mut new_categories = t.categories().to_vec();

    for j in 0..d {
        let col = t.values().column(j);
        let present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
        if present.is_empty() {
            return Err(DataError::EmptyColumn { col: j });
        }

        match t.column_kinds()[j] {
            ColumnKind::Categorical => {
                // Build the sorted re-coding map old code -> new code.
                let remap: Vec<(f64, f64)> = match &t.categories()[j] {
                    Some(names) => {
                        let mut order: Vec<usize> = (0..names.len()).collect();
                        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
                        let mut sorted_names: Vec<String> =
                            order.iter().map(|&o| names[o].clone()).collect();
                        sorted_names.dedup();
                        let map = order
                            .iter()
                            .enumerate()
                            .map(|(new, &old)| (old as f64, new as f64))
                            .collect();
                        new_categories[j] = Some(sorted_names);
                        map
                    }
                    None => {
                        let mut distinct = present.clone();
                        distinct.sort_by(f64::total_cmp);
                        distinct.dedup();
                        distinct
                            .iter()
                            .enumerate()
                            .map(|(new, &old)| (old, new as f64))
                            .collect()
                    }
                };
                let recode = |v: f64| -> f64 {
                    remap
                        .iter()
                        .find(|(old, _)| *old == v)
                        .map(|(_, new)| *new)
                        .unwrap_or(v)
                };
                let recoded: Vec<f64> = col
                    .iter()
                    .map(|&v| if v.is_nan() { f64::NAN } else { recode(v) })
                    .collect();
                // Mode over the re-coded values; ties to the smallest code.
                let mut counts: Vec<(f64, usize)> = Vec::new();
                for &v in recoded.iter().filter(|v| !v.is_nan()) {
                    match counts.iter_mut().find(|(c, _)| *c == v) {
                        Some((_, k)) => *k += 1,
                        None => counts.push((v, 1)),
                    }
                }
                counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
                let mode = counts[0].0;
                for (i, &v) in recoded.iter().enumerate() {
                    out.values_mut().set(i, j, if v.is_nan() { mode } else { v });
                }
            }
            ColumnKind::Numeric => {
                let mut sorted = present.clone();
                sorted.sort_by(f64::total_cmp);
                let median = if sorted.len() % 2 == 1 {
                    sorted[sorted.len() / 2]
                } else {
                    let hi = sorted.len() / 2;
                    (sorted[hi - 1] + sorted[hi]) / 2.0
                };
                for i in 0..n {
                    let v = t.values().get(i, j);
                    if v.is_nan() {
                        out.values_mut().set(i, j, median);
                    }
                }
            }
        }
    }

    out.set_categories(new_categories);
    debug_assert!(!out.values().has_missing());
    Ok(out)
}
