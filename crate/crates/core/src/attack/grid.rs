//! The (table, seed, attack, classifier) evaluation grid.

use crate::data::{stratified_split, Table};
use crate::readout::{accuracy, TableClassifier};
use crate::report::ReportCell;

use super::{AttackError, AttackKind, AttackParams, AttackSpec, Instance};

/// A cell that failed, with its coordinates; the grid keeps going.
#[derive(Debug)]
pub struct CellFailure {
    pub dataset: String,
    pub seed: u64,
    pub condition: String,
    pub error: AttackError,
}

#[derive(Debug, Default)]
pub struct AttackGridOutput {
    pub cells: Vec<ReportCell>,
    pub failures: Vec<CellFailure>,
    /// Structured null-space exclusions: `(dataset, seed, null_dim)`. These
    /// are expected outcomes, not failures.
    pub exclusions: Vec<(String, u64, usize)>,
}

/// Run every `(table, seed, attack, classifier)` combination. The
/// `(dataset, seed)` split is computed once and reused across classifiers
/// and attacks; each cell reports clean accuracy, poisoned accuracy, and the
/// signed delta in percentage points.
pub fn run_attack_grid(
    classifiers: &[Box<dyn TableClassifier>],
    tables: &[Table],
    attacks: &[AttackKind],
    params: &AttackParams,
    seeds: &[u64],
    context_frac: f64,
) -> AttackGridOutput {
    let mut out = AttackGridOutput::default();
    for table in tables {
        for &seed in seeds {
            let split = match stratified_split(table, seed, context_frac) {
                Ok(s) => s,
                Err(e) => {
                    out.failures.push(CellFailure {
                        dataset: table.name().to_owned(),
                        seed,
                        condition: "split".into(),
                        error: AttackError::Data(e),
                    });
                    continue;
                }
            };
            let instance = Instance::from_split(table, &split);
            let labels = table.labels().expect("attack grid needs labels");
            let query_labels: Vec<usize> =
                split.query_idx.iter().map(|&i| labels[i]).collect();

            // clean accuracies, one pass per classifier
            let mut clean_acc = Vec::with_capacity(classifiers.len());
            for classifier in classifiers {
                let acc = classifier
                    .classify(table, &split)
                    .map(|p| accuracy(&p, &query_labels));
                clean_acc.push(acc);
            }

            for &attack in attacks {
                let spec = AttackSpec {
                    kind: attack,
                    params: params.clone(),
                    seed,
                };
                let poisoned = match spec.apply(&instance) {
                    Ok(p) => p,
                    Err(AttackError::NullspaceExcluded { null_dim }) => {
                        out.exclusions
                            .push((table.name().to_owned(), seed, null_dim));
                        continue;
                    }
                    Err(e) => {
                        out.failures.push(CellFailure {
                            dataset: table.name().to_owned(),
                            seed,
                            condition: attack.name().to_owned(),
                            error: e,
                        });
                        continue;
                    }
                };
                let poisoned_instance = Instance {
                    context: poisoned.context.clone(),
                    query: poisoned.query.clone(),
                };
                let (ptable, psplit) = match poisoned_instance.to_table_split(seed) {
                    Ok(v) => v,
                    Err(e) => {
                        out.failures.push(CellFailure {
                            dataset: table.name().to_owned(),
                            seed,
                            condition: attack.name().to_owned(),
                            error: AttackError::Data(e),
                        });
                        continue;
                    }
                };

                for (ci, classifier) in classifiers.iter().enumerate() {
                    let condition = format!("{}|{}", attack.name(), classifier.name());
                    let clean = match &clean_acc[ci] {
                        Ok(a) => *a,
                        Err(e) => {
                            out.failures.push(CellFailure {
                                dataset: table.name().to_owned(),
                                seed,
                                condition,
                                error: AttackError::Readout(clone_readout_err(e)),
                            });
                            continue;
                        }
                    };
                    match classifier.classify(&ptable, &psplit) {
                        Ok(p) => {
                            let pois = accuracy(&p, &query_labels);
                            let dataset = table.name().to_owned();
                            out.cells.push(ReportCell::new(
                                dataset.clone(),
                                seed,
                                condition.clone(),
                                "clean_accuracy",
                                clean,
                            ));
                            out.cells.push(ReportCell::new(
                                dataset.clone(),
                                seed,
                                condition.clone(),
                                "poisoned_accuracy",
                                pois,
                            ));
                            out.cells.push(ReportCell::new(
                                dataset,
                                seed,
                                condition,
                                "delta_pp",
                                (pois - clean) * 100.0,
                            ));
                        }
                        Err(e) => out.failures.push(CellFailure {
                            dataset: table.name().to_owned(),
                            seed,
                            condition,
                            error: AttackError::Readout(e),
                        }),
                    }
                }
            }
        }
    }
    out
}

// ReadoutError is not Clone (it can wrap io errors); cells that reuse a
// failed clean run restate the message instead.
fn clone_readout_err(e: &crate::readout::ReadoutError) -> crate::readout::ReadoutError {
    crate::readout::ReadoutError::Shape(e.to_string())
}
