//! Ingestion of externally produced activation matrices.
//!
//! A dump directory holds one headerless CSV of `n x D` reals per layer plus
//! a plain-text `manifest.txt` with one line per matrix:
//!
//! ```text
//! layer=<int> dataset=<name> seed=<int> split=<context|query>
//! ```
//!
//! The matrix for a line lives in
//! `<dataset>_seed<seed>_layer<layer>_<split>.csv` next to the manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use super::{DataError, Matrix};

/// Whether a dumped matrix holds context or query rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRole {
    Context,
    Query,
}

impl fmt::Display for SplitRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitRole::Context => write!(f, "context"),
            SplitRole::Query => write!(f, "query"),
        }
    }
}

/// One dumped activation matrix with its manifest coordinates.
#[derive(Debug, Clone)]
pub struct ActivationEntry {
    pub layer: i64,
    pub dataset: String,
    pub seed: u64,
    pub split: SplitRole,
    pub matrix: Matrix,
}

impl ActivationEntry {
    pub fn file_name(&self) -> String {
        entry_file_name(&self.dataset, self.seed, self.layer, self.split)
    }
}

fn entry_file_name(dataset: &str, seed: u64, layer: i64, split: SplitRole) -> String {
    format!("{dataset}_seed{seed}_layer{layer}_{split}.csv")
}

/// Load every entry listed in `<dir>/manifest.txt`.
pub fn load_activation_dump(dir: impl AsRef<Path>) -> Result<Vec<ActivationEntry>, DataError> {
    let dir = dir.as_ref();
    let manifest = dir.join("manifest.txt");
    if !manifest.exists() {
        return Err(DataError::MissingFile(manifest));
    }
    let text = std::fs::read_to_string(&manifest)?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut layer = None;
        let mut dataset = None;
        let mut seed = None;
        let mut split = None;
        for field in line.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| DataError::Manifest {
                line: lineno + 1,
                msg: format!("expected key=value, got {field:?}"),
            })?;
            match k {
                "layer" => layer = v.parse::<i64>().ok(),
                "dataset" => dataset = Some(v.to_owned()),
                "seed" => seed = v.parse::<u64>().ok(),
                "split" => {
                    split = match v {
                        "context" => Some(SplitRole::Context),
                        "query" => Some(SplitRole::Query),
                        _ => None,
                    }
                }
                other => {
                    return Err(DataError::Manifest {
                        line: lineno + 1,
                        msg: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        let (layer, dataset, seed, split) = match (layer, dataset, seed, split) {
            (Some(l), Some(d), Some(s), Some(sp)) => (l, d, s, sp),
            _ => {
                return Err(DataError::Manifest {
                    line: lineno + 1,
                    msg: "need layer=, dataset=, seed=, split=".into(),
                })
            }
        };
        let path = dir.join(entry_file_name(&dataset, seed, layer, split));
        let matrix = read_headerless_csv(&path)?;
        entries.push(ActivationEntry {
            layer,
            dataset,
            seed,
            split,
            matrix,
        });
    }
    Ok(entries)
}

/// Write entries and their manifest into `dir` (used by tests and exporters).
pub fn write_activation_dump(
    dir: impl AsRef<Path>,
    entries: &[ActivationEntry],
) -> Result<(), DataError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    for e in entries {
        manifest.push_str(&format!(
            "layer={} dataset={} seed={} split={}\n",
            e.layer, e.dataset, e.seed, e.split
        ));
        let mut body = String::new();
        for i in 0..e.matrix.n_rows() {
            let row: Vec<String> = e.matrix.row(i).iter().map(|v| format!("{v}")).collect();
            body.push_str(&row.join(","));
            body.push('\n');
        }
        std::fs::write(dir.join(e.file_name()), body)?;
    }
    std::fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

fn read_headerless_csv(path: &PathBuf) -> Result<Matrix, DataError> {
    if !path.exists() {
        return Err(DataError::MissingFile(path.clone()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row: Result<Vec<f64>, _> = record.iter().map(|c| c.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| DataError::InvalidParam(format!("bad matrix cell: {e}")))?);
    }
    if rows.is_empty() {
        return Err(DataError::NoDataRows);
    }
    Matrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let entries = vec![
            ActivationEntry {
                layer: 9,
                dataset: "demo".into(),
                seed: 0,
                split: SplitRole::Context,
                matrix: Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap(),
            },
            ActivationEntry {
                layer: 9,
                dataset: "demo".into(),
                seed: 0,
                split: SplitRole::Query,
                matrix: Matrix::new(1, 3, vec![7.0, 8.0, 9.0]).unwrap(),
            },
        ];
        write_activation_dump(dir.path(), &entries).unwrap();
        let loaded = load_activation_dump(dir.path()).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].matrix, entries[0].matrix);
        assert_eq!(loaded[1].split, SplitRole::Query);
    }

    #[test]
    fn malformed_manifest_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("manifest.txt"), "layer=1 nonsense\n").unwrap();
        match load_activation_dump(dir.path()) {
            Err(DataError::Manifest { line: 1, .. }) => {}
            other => panic!("expected manifest error, got {other:?}"),
        }
    }
}
