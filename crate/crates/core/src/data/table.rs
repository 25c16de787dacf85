//! The supervised table type shared by every module.

use super::{DataError, Matrix};

/// Whether a column holds continuous values or integer category codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// A numeric matrix with per-column kinds and either class labels or real
/// targets (or neither, for unlabeled enumerations).
///
/// Class indices are contiguous `0..C`. Categorical columns hold non-negative
/// integer codes once [`super::encode_and_impute`] has run; before that they
/// may contain `NaN` for missing entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    values: Matrix,
    column_kinds: Vec<ColumnKind>,
    /// For categorical columns ingested from strings: code -> original value.
    categories: Vec<Option<Vec<String>>>,
    labels: Option<Vec<usize>>,
    class_names: Option<Vec<String>>,
    targets: Option<Vec<f64>>,
}

impl Table {
    pub fn classification(
        name: impl Into<String>,
        values: Matrix,
        column_kinds: Vec<ColumnKind>,
        labels: Vec<usize>,
    ) -> Result<Table, DataError> {
        let mut t = Table::unlabeled(name, values, column_kinds)?;
        if labels.len() != t.values.n_rows() {
            return Err(DataError::Shape("labels length != row count".into()));
        }
        let c = labels.iter().max().map_or(0, |m| m + 1);
        if c < 1 {
            return Err(DataError::Shape("empty label vector".into()));
        }
        for k in 0..c {
            if !labels.contains(&k) {
                return Err(DataError::Shape(format!(
                    "class indices not contiguous: {k} absent below max {}",
                    c - 1
                )));
            }
        }
        t.labels = Some(labels);
        Ok(t)
    }

    pub fn regression(
        name: impl Into<String>,
        values: Matrix,
        column_kinds: Vec<ColumnKind>,
        targets: Vec<f64>,
    ) -> Result<Table, DataError> {
        let mut t = Table::unlabeled(name, values, column_kinds)?;
        if targets.len() != t.values.n_rows() {
            return Err(DataError::Shape("targets length != row count".into()));
        }
        t.targets = Some(targets);
        Ok(t)
    }

    pub fn unlabeled(
        name: impl Into<String>,
        values: Matrix,
        column_kinds: Vec<ColumnKind>,
    ) -> Result<Table, DataError> {
        if values.n_rows() == 0 || values.n_cols() == 0 {
            return Err(DataError::NoDataRows);
        }
        if column_kinds.len() != values.n_cols() {
            return Err(DataError::Shape("column_kinds length != column count".into()));
        }
        let cols = values.n_cols();
        Ok(Table {
            name: name.into(),
            values,
            column_kinds,
            categories: vec![None; cols],
            labels: None,
            class_names: None,
            targets: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n_rows(&self) -> usize {
        self.values.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.n_cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Matrix {
        &mut self.values
    }

    pub fn column_kinds(&self) -> &[ColumnKind] {
        &self.column_kinds
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn labels_mut(&mut self) -> Option<&mut Vec<usize>> {
        self.labels.as_mut()
    }

    pub fn targets(&self) -> Option<&[f64]> {
        self.targets.as_deref()
    }

    pub fn is_classification(&self) -> bool {
        self.labels.is_some()
    }

    /// Number of classes (0 for non-classification tables).
    pub fn class_count(&self) -> usize {
        self.labels
            .as_ref()
            .map_or(0, |l| l.iter().max().map_or(0, |m| m + 1))
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    pub(super) fn set_class_names(&mut self, names: Vec<String>) {
        self.class_names = Some(names);
    }

    pub(super) fn categories(&self) -> &[Option<Vec<String>>] {
        &self.categories
    }

    pub(super) fn set_categories(&mut self, categories: Vec<Option<Vec<String>>>) {
        assert_eq!(categories.len(), self.n_cols());
        self.categories = categories;
    }

    /// Replace the labels, keeping everything else. The new labels must obey
    /// the contiguity invariant.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Table, DataError> {
        let mut t = Table::classification(
            self.name.clone(),
            self.values.clone(),
            self.column_kinds.clone(),
            labels,
        )?;
        t.categories = self.categories.clone();
        Ok(t)
    }

    /// Replace the value matrix, keeping metadata. Shapes must match.
    pub fn with_values(&self, values: Matrix) -> Result<Table, DataError> {
        if values.n_rows() != self.n_rows() || values.n_cols() != self.n_cols() {
            return Err(DataError::Shape("with_values shape mismatch".into()));
        }
        let mut t = self.clone();
        t.values = values;
        Ok(t)
    }

    /// New table holding the selected rows (labels/targets follow).
    pub fn select_rows(&self, idx: &[usize]) -> Table {
        Table {
            name: self.name.clone(),
            values: self.values.select_rows(idx),
            column_kinds: self.column_kinds.clone(),
            categories: self.categories.clone(),
            labels: self
                .labels
                .as_ref()
                .map(|l| idx.iter().map(|&i| l[i]).collect()),
            class_names: self.class_names.clone(),
            targets: self
                .targets
                .as_ref()
                .map(|t| idx.iter().map(|&i| t[i]).collect()),
        }
    }

    /// Byte-stable textual serialization used by determinism tests.
    pub fn canonical_string(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "name={}", self.name);
        let _ = writeln!(
            s,
            "kinds={}",
            self.column_kinds
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        for i in 0..self.n_rows() {
            let row = self
                .values
                .row(i)
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(",");
            match (&self.labels, &self.targets) {
                (Some(l), _) => {
                    let _ = writeln!(s, "{row};y={}", l[i]);
                }
                (_, Some(t)) => {
                    let _ = writeln!(s, "{row};t={:?}", t[i]);
                }
                _ => {
                    let _ = writeln!(s, "{row}");
                }
            }
        }
        s
    }
}
