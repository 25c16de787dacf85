//! CSV ingestion.
//!
//! Dialect: comma-separated, first row is the header, UTF-8, `.` decimal
//! point. Empty cells are missing. Column kinds are inferred unless
//! overridden: any non-numeric cell makes a column categorical (coded by
//! first-appearance order until [`super::encode_and_impute`] re-codes it in
//! sorted order); an all-integer column with at most
//! [`CATEGORICAL_CARDINALITY`] distinct values is also treated as
//! categorical.

use std::collections::HashMap;
use std::path::Path;

use super::{ColumnKind, DataError, Matrix, Table};

/// Distinct-value cutoff for the all-integer -> categorical inference.
pub const CATEGORICAL_CARDINALITY: usize = 10;

/// Load a labeled table from a CSV file.
///
/// `kind_overrides` maps column names to forced kinds. An override for the
/// label column itself selects interpretation: `Numeric` forces regression
/// targets, `Categorical` forces classification. Without an override the
/// label is classification unless it parses numeric with fractional values.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    kind_overrides: Option<&HashMap<String, ColumnKind>>,
) -> Result<Table, DataError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(DataError::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_owned()))?;

    let mut raw: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        raw.push(record.iter().map(str::to_owned).collect());
    }
    if raw.is_empty() {
        return Err(DataError::NoDataRows);
    }

    let n = raw.len();
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&j| j != label_idx).collect();
    let d = feature_cols.len();

    let mut values = Matrix::zeros(n, d);
    let mut kinds = Vec::with_capacity(d);
    let mut categories: Vec<Option<Vec<String>>> = Vec::with_capacity(d);

    for (out_j, &j) in feature_cols.iter().enumerate() {
        let cells: Vec<&str> = raw.iter().map(|r| r[j].trim()).collect();
        let parsed: Vec<Option<f64>> = cells
            .iter()
            .map(|c| {
                if c.is_empty() {
                    None
                } else {
                    c.parse::<f64>().ok().map(Some).unwrap_or(Some(f64::NAN))
                }
            })
            .collect();
        let any_text = parsed.iter().any(|p| matches!(p, Some(v) if v.is_nan()));
        let override_kind = kind_overrides.and_then(|m| m.get(&headers[j]).copied());

        let kind = if let Some(k) = override_kind {
            k
        } else if any_text {
            ColumnKind::Categorical
        } else {
            let present: Vec<f64> = parsed.iter().flatten().copied().collect();
            let all_int = present.iter().all(|v| v.fract() == 0.0);
            let mut distinct = present.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            if all_int && !present.is_empty() && distinct.len() <= CATEGORICAL_CARDINALITY {
                ColumnKind::Categorical
            } else {
                ColumnKind::Numeric
            }
        };

        if any_text {
            // String-valued column: first-appearance ordinal codes.
            let mut seen: Vec<String> = Vec::new();
            for (i, cell) in cells.iter().enumerate() {
                if cell.is_empty() {
                    values.set(i, out_j, f64::NAN);
                    continue;
                }
                let code = match seen.iter().position(|s| s == cell) {
                    Some(p) => p,
                    None => {
                        seen.push((*cell).to_owned());
                        seen.len() - 1
                    }
                };
                values.set(i, out_j, code as f64);
            }
            categories.push(Some(seen));
        } else {
            for (i, p) in parsed.iter().enumerate() {
                values.set(i, out_j, p.unwrap_or(f64::NAN));
            }
            categories.push(None);
        }
        kinds.push(kind);
    }

    let label_cells: Vec<&str> = raw.iter().map(|r| r[label_idx].trim()).collect();
    for (i, c) in label_cells.iter().enumerate() {
        if c.is_empty() {
            return Err(DataError::MissingLabel { row: i });
        }
    }
    let label_numeric: Option<Vec<f64>> = label_cells
        .iter()
        .map(|c| c.parse::<f64>().ok())
        .collect();
    let label_override = kind_overrides.and_then(|m| m.get(label_column).copied());
    let regression = match label_override {
        Some(ColumnKind::Numeric) => true,
        Some(ColumnKind::Categorical) => false,
        None => label_numeric
            .as_ref()
            .is_some_and(|v| v.iter().any(|x| x.fract() != 0.0)),
    };

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_owned());

    if regression {
        let targets = label_numeric.ok_or_else(|| {
            DataError::InvalidParam("regression label column contains non-numeric cells".into())
        })?;
        let mut t = Table::regression(name, values, kinds, targets)?;
        t.set_categories(categories);
        Ok(t)
    } else {
        // Classes are coded by sorted distinct raw values: numerically when
        // every label parses, lexicographically otherwise.
        let mut distinct: Vec<String> = label_cells.iter().map(|c| (*c).to_owned()).collect();
        if let Some(nums) = &label_numeric {
            let mut pairs: Vec<(f64, String)> = nums
                .iter()
                .zip(label_cells.iter())
                .map(|(v, c)| (*v, (*c).to_owned()))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            distinct = pairs.into_iter().map(|(_, c)| c).collect();
        } else {
            distinct.sort();
        }
        distinct.dedup();
        let labels: Vec<usize> = label_cells
            .iter()
            .map(|c| distinct.iter().position(|d| d == c).expect("label present"))
            .collect();
        let mut t = Table::classification(name, values, kinds, labels)?;
        t.set_categories(categories);
        t.set_class_names(distinct);
        Ok(t)
    }
}
