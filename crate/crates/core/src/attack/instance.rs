//! Attack instances and their reversible provenance.

use crate::data::{DataError, Matrix, Split, Table};

/// A materialized context/query pair, the unit attacks operate on.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub context: Table,
    pub query: Table,
}

impl Instance {
    pub fn from_split(table: &Table, split: &Split) -> Instance {
        Instance {
            context: table.select_rows(&split.context_idx),
            query: table.select_rows(&split.query_idx),
        }
    }

    /// Rebuild a `(Table, Split)` pair with context rows first, so any
    /// `TableClassifier` can rescore the instance.
    pub fn to_table_split(&self, seed: u64) -> Result<(Table, Split), DataError> {
        let nc = self.context.n_rows();
        let nq = self.query.n_rows();
        let mut values = self.context.values().clone();
        for i in 0..nq {
            values.push_row(self.query.values().row(i));
        }
        let labels: Option<Vec<usize>> = match (self.context.labels(), self.query.labels()) {
            (Some(c), Some(q)) => Some(c.iter().chain(q.iter()).copied().collect()),
            _ => None,
        };
        let table = match labels {
            Some(l) => Table::classification(
                self.context.name(),
                values,
                self.context.column_kinds().to_vec(),
                l,
            )?,
            None => Table::unlabeled(
                self.context.name(),
                values,
                self.context.column_kinds().to_vec(),
            )?,
        };
        Ok((
            table,
            Split {
                context_idx: (0..nc).collect(),
                query_idx: (nc..nc + nq).collect(),
                seed,
                stratified: false,
            },
        ))
    }
}

/// What an attack changed, carrying enough originals to reconstruct the
/// clean instance exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Nothing changed.
    Identity,
    /// `count` rows were appended to the end of the context.
    AppendedRows { count: usize },
    /// Context labels changed: `(row, original_label)` pairs.
    RelabeledRows { original: Vec<(usize, usize)> },
    /// Feature values rewritten; originals stored verbatim.
    FeatureRewrite {
        original_context: Matrix,
        original_query: Matrix,
    },
    /// Only context features shifted (null-space attack).
    ContextShift { original_context: Matrix },
}

/// A perturbed instance plus the record of what was done.
#[derive(Debug, Clone, PartialEq)]
pub struct PoisonedInstance {
    pub context: Table,
    pub query: Table,
    pub provenance: Provenance,
}

impl PoisonedInstance {
    /// Reconstruct the clean instance from the provenance, exactly.
    pub fn un_apply(&self) -> Result<Instance, DataError> {
        match &self.provenance {
            Provenance::Identity => Ok(Instance {
                context: self.context.clone(),
                query: self.query.clone(),
            }),
            Provenance::AppendedRows { count } => {
                let keep: Vec<usize> = (0..self.context.n_rows() - count).collect();
                Ok(Instance {
                    context: self.context.select_rows(&keep),
                    query: self.query.clone(),
                })
            }
            Provenance::RelabeledRows { original } => {
                let mut labels = self
                    .context
                    .labels()
                    .ok_or_else(|| DataError::Shape("relabeled instance lost labels".into()))?
                    .to_vec();
                for &(row, old) in original {
                    labels[row] = old;
                }
                Ok(Instance {
                    context: self.context.with_labels(labels)?,
                    query: self.query.clone(),
                })
            }
            Provenance::FeatureRewrite {
                original_context,
                original_query,
            } => Ok(Instance {
                context: self.context.with_values(original_context.clone())?,
                query: self.query.with_values(original_query.clone())?,
            }),
            Provenance::ContextShift { original_context } => Ok(Instance {
                context: self.context.with_values(original_context.clone())?,
                query: self.query.clone(),
            }),
        }
    }

    /// Structural summary used by property tests: (rows appended, labels
    /// changed, features changed).
    pub fn change_shape(&self) -> (bool, bool, bool) {
        match &self.provenance {
            Provenance::Identity => (false, false, false),
            Provenance::AppendedRows { .. } => (true, false, false),
            Provenance::RelabeledRows { .. } => (false, true, false),
            Provenance::FeatureRewrite { .. } | Provenance::ContextShift { .. } => {
                (false, false, true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, stratified_split, SyntheticSpec};

    #[test]
    fn table_split_round_trip() {
        let t = generate_synthetic(&SyntheticSpec::new("xor_2d").with("n", 30.0), 0).unwrap();
        let s = stratified_split(&t, 0, 0.8).unwrap();
        let inst = Instance::from_split(&t, &s);
        let (combined, split) = inst.to_table_split(0).unwrap();
        assert_eq!(combined.n_rows(), 30);
        assert_eq!(split.context_idx.len(), inst.context.n_rows());
        // first context row of the combined table is the first context row
        assert_eq!(
            combined.values().row(0),
            t.values().row(s.context_idx[0])
        );
    }
}
