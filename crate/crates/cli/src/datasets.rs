//! Dataset resolution for CLI runs: CSV paths or `synthetic:` URIs.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{Context, Result};
use tabaudit::data::{
    encode_and_impute, generate_synthetic, load_csv, parse_synthetic_uri, ColumnKind, Table,
};

/// Load one dataset spec. Synthetic tables are generated with the fixed
/// `gen_seed` (the per-cell seeds drive splits and attacks, not generation),
/// CSV tables are encoded and imputed after loading.
pub fn load_dataset(
    spec: &str,
    label_column: &str,
    gen_seed: u64,
    regression_label: bool,
) -> Result<Table> {
    if spec.starts_with("synthetic:") {
        let s = parse_synthetic_uri(spec)?;
        Ok(generate_synthetic(&s, gen_seed)?)
    } else {
        let overrides: Option<HashMap<String, ColumnKind>> = regression_label.then(|| {
            let mut m = HashMap::new();
            m.insert(label_column.to_owned(), ColumnKind::Numeric);
            m
        });
        let t = load_csv(Path::new(spec), label_column, overrides.as_ref())
            .with_context(|| format!("loading {spec}"))?;
        Ok(encode_and_impute(&t)?)
    }
}

pub fn load_datasets(
    specs: &[String],
    label_column: &str,
    gen_seed: u64,
    regression_label: bool,
) -> Result<Vec<Table>> {
    specs
        .iter()
        .map(|s| load_dataset(s, label_column, gen_seed, regression_label))
        .collect()
}
