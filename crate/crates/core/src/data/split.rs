//! Seeded context/query partitions.

use rand::seq::SliceRandom;

use super::{DataError, Table};
use crate::rng::cell_rng;

/// A context/query partition with its seed provenance.
///
/// `context_idx` and `query_idx` are disjoint, sorted ascending, and together
/// cover `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub context_idx: Vec<usize>,
    pub query_idx: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl Split {
    pub fn validate(&self, n: usize) -> Result<(), DataError> {
        let mut seen = vec![false; n];
        for &i in self.context_idx.iter().chain(self.query_idx.iter()) {
            if i >= n || seen[i] {
                return Err(DataError::Shape("split is not a partition".into()));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(DataError::Shape("split does not cover all rows".into()));
        }
        Ok(())
    }
}

/// Seeded 80/20-style context/query split.
///
/// Classification tables are stratified: per-class context counts start at
/// `floor(frac * n_c)`, clamped to at least one row, and the remainder up to
/// `round(frac * n)` is assigned in class-index order, so every class present
/// in the table appears in the context set. Regression and unlabeled tables
/// split without stratification.
pub fn stratified_split(t: &Table, seed: u64, context_frac: f64) -> Result<Split, DataError> {
    if !(context_frac > 0.0 && context_frac < 1.0) {
        return Err(DataError::InvalidParam(format!(
            "context_frac must lie in (0,1), got {context_frac}"
        )));
    }
    let n = t.n_rows();
    let mut rng = cell_rng(t.name(), seed, "stratified_split");

    let (mut context, mut query) = if let Some(labels) = t.labels() {
        let c = t.class_count();
        let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); c];
        for (i, &y) in labels.iter().enumerate() {
            per_class[y].push(i);
        }
        for (k, rows) in per_class.iter().enumerate() {
            if rows.len() < 2 {
                return Err(DataError::SingletonClass { class: k });
            }
        }
        let target = ((context_frac * n as f64).round() as usize).clamp(1, n - 1);
        let mut counts: Vec<usize> = per_class
            .iter()
            .map(|rows| ((context_frac * rows.len() as f64).floor() as usize).max(1))
            .collect();
        // Distribute the remainder (either sign) in class-index order.
        let mut total: usize = counts.iter().sum();
        let mut k = 0;
        while total < target {
            if counts[k] < per_class[k].len() {
                counts[k] += 1;
                total += 1;
            }
            k = (k + 1) % counts.len();
        }
        let mut k = 0;
        while total > target {
            if counts[k] > 1 {
                counts[k] -= 1;
                total -= 1;
            }
            k = (k + 1) % counts.len();
        }

        let mut context = Vec::with_capacity(total);
        let mut query = Vec::with_capacity(n - total);
        for (rows, &take) in per_class.iter_mut().zip(counts.iter()) {
            rows.shuffle(&mut rng);
            context.extend_from_slice(&rows[..take]);
            query.extend_from_slice(&rows[take..]);
        }
        (context, query)
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        let take = ((context_frac * n as f64).round() as usize).clamp(1, n - 1);
        (rows[..take].to_vec(), rows[take..].to_vec())
    };

    context.sort_unstable();
    query.sort_unstable();
    let split = Split {
        context_idx: context,
        query_idx: query,
        seed,
        stratified: t.is_classification(),
    };
    split.validate(n)?;
    Ok(split)
}

/// Split with an absolute context-row count instead of a fraction.
pub fn count_split(t: &Table, seed: u64, context_rows: usize) -> Result<Split, DataError> {
    let n = t.n_rows();
    if context_rows == 0 || context_rows >= n {
        return Err(DataError::InvalidParam(format!(
            "context_rows must lie in 1..{n}, got {context_rows}"
        )));
    }
    stratified_split(t, seed, context_rows as f64 / n as f64)
}
