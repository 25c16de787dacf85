//! The `ReportCell` measurement unit and its serialized forms.
//!
//! Every experiment emits one cell per `(dataset, seed, condition, metric)`
//! coordinate. CSV output is byte-stable: cells are sorted by that coordinate
//! and floats print in Rust's shortest round-trip form, so identical runs
//! produce identical files.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One measurement: a metric value at a `(dataset, seed, condition)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub dataset: String,
    pub seed: u64,
    pub condition: String,
    pub metric: String,
    pub value: f64,
}

impl ReportCell {
    pub fn new(
        dataset: impl Into<String>,
        seed: u64,
        condition: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
    ) -> Self {
        Self {
            dataset: dataset.into(),
            seed,
            condition: condition.into(),
            metric: metric.into(),
            value,
        }
    }

    fn key(&self) -> (&str, u64, &str, &str) {
        (&self.dataset, self.seed, &self.condition, &self.metric)
    }
}

/// Errors from report serialization.
#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("empty report")]
    Empty,
    #[error("duplicate cell ({0}, {1}, {2}, {3})")]
    Duplicate(String, u64, String, String),
    #[error("malformed report row {row}: {msg}")]
    Malformed { row: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Sort cells into the canonical emission order.
pub fn sort_cells(cells: &mut [ReportCell]) {
    cells.sort_by(|a, b| a.key().cmp(&b.key()));
}

/// Check the `(dataset, seed, condition, metric)` uniqueness invariant.
pub fn validate_unique(cells: &[ReportCell]) -> Result<(), ReportError> {
    let mut keys: Vec<_> = cells.iter().map(ReportCell::key).collect();
    keys.sort();
    for w in keys.windows(2) {
        if w[0] == w[1] {
            return Err(ReportError::Duplicate(
                w[0].0.to_owned(),
                w[0].1,
                w[0].2.to_owned(),
                w[0].3.to_owned(),
            ));
        }
    }
    Ok(())
}

/// Render cells as CSV in canonical order.
pub fn cells_to_csv(cells: &[ReportCell]) -> Result<String, ReportError> {
    if cells.is_empty() {
        return Err(ReportError::Empty);
    }
    validate_unique(cells)?;
    let mut sorted = cells.to_vec();
    sort_cells(&mut sorted);
    let mut out = String::from("dataset,seed,condition,metric,value\n");
    for c in &sorted {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&c.dataset),
            c.seed,
            csv_field(&c.condition),
            csv_field(&c.metric),
            c.value
        ));
    }
    Ok(out)
}

/// Parse cells from CSV text (header required).
pub fn cells_from_csv(text: &str) -> Result<Vec<ReportCell>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut cells = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ReportError::Malformed {
            row: i + 2,
            msg: e.to_string(),
        })?;
        if record.len() != 5 {
            return Err(ReportError::Malformed {
                row: i + 2,
                msg: format!("expected 5 fields, got {}", record.len()),
            });
        }
        let seed = record[1].parse::<u64>().map_err(|e| ReportError::Malformed {
            row: i + 2,
            msg: format!("seed: {e}"),
        })?;
        let value = record[4].parse::<f64>().map_err(|e| ReportError::Malformed {
            row: i + 2,
            msg: format!("value: {e}"),
        })?;
        cells.push(ReportCell::new(
            record[0].to_owned(),
            seed,
            record[2].to_owned(),
            record[3].to_owned(),
            value,
        ));
    }
    if cells.is_empty() {
        return Err(ReportError::Empty);
    }
    Ok(cells)
}

pub fn read_cells(path: impl AsRef<Path>) -> Result<Vec<ReportCell>, ReportError> {
    let text = std::fs::read_to_string(path)?;
    cells_from_csv(&text)
}

pub fn write_cells(path: impl AsRef<Path>, cells: &[ReportCell]) -> Result<(), ReportError> {
    std::fs::write(path, cells_to_csv(cells)?)?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl fmt::Display for ReportCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}: {} = {}",
            self.dataset, self.seed, self.condition, self.metric, self.value
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_two_lines() {
        let cells = vec![ReportCell::new("d", 0, "clean", "accuracy", 0.5)];
        let csv = cells_to_csv(&cells).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.ends_with("d,0,clean,accuracy,0.5\n"));
    }

    #[test]
    fn emission_order_is_canonical() {
        let cells = vec![
            ReportCell::new("b", 0, "c", "m", 1.0),
            ReportCell::new("a", 1, "c", "m", 2.0),
            ReportCell::new("a", 0, "c", "m", 3.0),
        ];
        let csv = cells_to_csv(&cells).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[1].starts_with("a,0"));
        assert!(lines[2].starts_with("a,1"));
        assert!(lines[3].starts_with("b,0"));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let cells = vec![
            ReportCell::new("d", 0, "clean", "accuracy", 0.8125),
            ReportCell::new("d", 0, "hub_poison", "accuracy", 0.75),
            ReportCell::new("d", 1, "clean", "delta_pp", -3.25),
        ];
        let csv = cells_to_csv(&cells).unwrap();
        let parsed = cells_from_csv(&csv).unwrap();
        assert_eq!(cells_to_csv(&parsed).unwrap(), csv);
    }

    #[test]
    fn duplicates_rejected() {
        let cells = vec![
            ReportCell::new("d", 0, "c", "m", 1.0),
            ReportCell::new("d", 0, "c", "m", 2.0),
        ];
        assert!(matches!(
            cells_to_csv(&cells),
            Err(ReportError::Duplicate(..))
        ));
    }
}
