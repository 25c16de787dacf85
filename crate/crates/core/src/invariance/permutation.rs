//! Permutation trials along the three axes.

use rand::seq::SliceRandom;

use crate::data::{Split, Table};
use crate::rng::cell_rng;

use super::InvarianceError;

/// Which axis a trial permutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermAxis {
    /// Context rows only; queries stay put.
    Row,
    /// Columns of every row, context and query alike.
    Column,
    /// Class indices of the labels.
    Label,
}

impl PermAxis {
    pub fn name(&self) -> &'static str {
        match self {
            PermAxis::Row => "row",
            PermAxis::Column => "column",
            PermAxis::Label => "label",
        }
    }
}

/// One permutation trial: an axis, an explicit index map on that axis's
/// range, and the seed it was drawn with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTrial {
    pub axis: PermAxis,
    pub permutation: Vec<usize>,
    pub seed: u64,
}

impl PermutationTrial {
    /// Draw a uniform permutation for the axis, keyed by
    /// `(table, seed, axis, trial_index)`.
    pub fn random(
        axis: PermAxis,
        table: &Table,
        split: &Split,
        seed: u64,
        trial_index: usize,
    ) -> Self {
        let len = match axis {
            PermAxis::Row => split.context_idx.len(),
            PermAxis::Column => table.n_cols(),
            PermAxis::Label => table.class_count(),
        };
        let mut permutation: Vec<usize> = (0..len).collect();
        let condition = format!("perm_{}_{}", axis.name(), trial_index);
        permutation.shuffle(&mut cell_rng(table.name(), seed, &condition));
        Self {
            axis,
            permutation,
            seed,
        }
    }

    pub fn identity(axis: PermAxis, len: usize) -> Self {
        Self {
            axis,
            permutation: (0..len).collect(),
            seed: 0,
        }
    }

    pub fn is_bijection(&self) -> bool {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        for &p in &self.permutation {
            if p >= n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        true
    }

    /// The inverse trial (applying both recovers the identity).
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.permutation.len()];
        for (i, &p) in self.permutation.iter().enumerate() {
            inv[p] = i;
        }
        Self {
            axis: self.axis,
            permutation: inv,
            seed: self.seed,
        }
    }
}

/// Apply a permutation trial to `(table, split)`.
///
/// * `Row`: context rows are re-shuffled among their own positions — the row
///   at context slot `i` receives the content of context slot `perm[i]`;
///   query rows and the split itself are untouched.
/// * `Column`: output column `j` takes input column `perm[j]` in every row,
///   with column kinds following.
/// * `Label`: every label `y` becomes `perm[y]`. Compare outputs through
///   [`crate::readout::ProbabilityMatrix::permute_classes`] with the same
///   map to undo it.
pub fn apply_permutation(
    table: &Table,
    split: &Split,
    trial: &PermutationTrial,
) -> Result<(Table, Split), InvarianceError> {
    if !trial.is_bijection() {
        return Err(InvarianceError::NotABijection {
            expected: trial.permutation.len(),
        });
    }
    match trial.axis {
        PermAxis::Row => {
            if trial.permutation.len() != split.context_idx.len() {
                return Err(InvarianceError::NotABijection {
                    expected: split.context_idx.len(),
                });
            }
            let mut order: Vec<usize> = (0..table.n_rows()).collect();
            for (slot, &src) in trial.permutation.iter().enumerate() {
                order[split.context_idx[slot]] = split.context_idx[src];
            }
            let mut t = table.select_rows(&order);
            t.set_name(table.name());
            Ok((t, split.clone()))
        }
        PermAxis::Column => {
            if trial.permutation.len() != table.n_cols() {
                return Err(InvarianceError::NotABijection {
                    expected: table.n_cols(),
                });
            }
            let n = table.n_rows();
            let d = table.n_cols();
            let mut values = crate::data::Matrix::zeros(n, d);
            for i in 0..n {
                for (j, &src) in trial.permutation.iter().enumerate() {
                    values.set(i, j, table.values().get(i, src));
                }
            }
            let mut t = table.with_values(values)?;
            // column kinds travel with their columns
            let kinds: Vec<_> = trial
                .permutation
                .iter()
                .map(|&src| table.column_kinds()[src])
                .collect();
            t = rebuild_with_kinds(&t, kinds)?;
            Ok((t, split.clone()))
        }
        PermAxis::Label => {
            let labels = table.labels().ok_or(InvarianceError::NeedsLabels)?;
            if trial.permutation.len() != table.class_count() {
                return Err(InvarianceError::NotABijection {
                    expected: table.class_count(),
                });
            }
            let new_labels: Vec<usize> = labels.iter().map(|&y| trial.permutation[y]).collect();
            let t = table.with_labels(new_labels)?;
            Ok((t, split.clone()))
        }
    }
}

fn rebuild_with_kinds(
    table: &Table,
    kinds: Vec<crate::data::ColumnKind>,
) -> Result<Table, InvarianceError> {
    let mut t = match (table.labels(), table.targets()) {
        (Some(labels), _) => Table::classification(
            table.name(),
            table.values().clone(),
            kinds,
            labels.to_vec(),
        )?,
        (None, Some(targets)) => Table::regression(
            table.name(),
            table.values().clone(),
            kinds,
            targets.to_vec(),
        )?,
        (None, None) => Table::unlabeled(table.name(), table.values().clone(), kinds)?,
    };
    t.set_name(table.name());
    Ok(t)
}
