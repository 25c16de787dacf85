//! `tabaudit` — deterministic experiment runner for the audit toolbox.

mod commands;
mod config;
mod datasets;
mod emit;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use tabaudit::attack::{AttackKind, AttackParams};
use tabaudit::invariance::PermAxis;

use commands::Common;
use config::RunConfig;
use emit::RunOutput;

#[derive(Parser)]
#[command(name = "tabaudit", version, about = "Mechanistic audit toolbox for tabular in-context learners")]
struct Cli {
    /// Plain-text config file ([section] headers, key = value lines);
    /// command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default ./tabaudit_out, or $TABAUDIT_OUT).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Worker pool size (outputs are identical at any size).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Dataset specs: CSV paths or synthetic URIs like
    /// `synthetic:xor_2d:n=250:d=5`.
    #[arg(long = "dataset")]
    datasets: Vec<String>,

    /// Label column name for CSV datasets.
    #[arg(long, default_value = "y")]
    label_column: String,

    /// Force the label column to be read as regression targets.
    #[arg(long, default_value_t = false)]
    regression_label: bool,

    /// Generation seed for synthetic datasets (split/attack seeds are
    /// separate).
    #[arg(long, default_value_t = 0)]
    gen_seed: u64,

    /// Number of seeds: cells run for seeds 0..N.
    #[arg(long, default_value_t = 1)]
    seeds: u64,

    /// Context fraction of the split.
    #[arg(long, default_value_t = 0.8)]
    context_frac: f64,

    /// Absolute context row count (overrides --context-frac).
    #[arg(long)]
    context_rows: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Hand-crafted model verification grid, ablation, and orbit bounds.
    Toy,
    /// Context-set attack grid.
    Attack {
        #[command(flatten)]
        data: DataArgs,
        /// Attack kinds (repeatable); defaults to the full battery.
        #[arg(long = "attack")]
        attacks: Vec<String>,
        /// Readouts to evaluate (repeatable).
        #[arg(long = "readout", default_values_t = vec!["knn5".to_owned()])]
        readouts: Vec<String>,
        /// Attack parameter overrides, `key=value` (repeatable).
        #[arg(long = "set")]
        overrides: Vec<String>,
    },
    /// Row/column/label permutation harness.
    Invariance {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "knn5")]
        readout: String,
        /// Permutation trials per (seed, axis).
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Axes to permute: comma-separated row,column,label.
        #[arg(long, default_value = "row,column,label")]
        axes: String,
        #[arg(long, default_value_t = tabaudit::invariance::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// External-oracle mode: baseline predictions CSV.
        #[arg(long)]
        baseline_preds: Option<PathBuf>,
        /// External-oracle mode: per-trial prediction CSVs (repeatable).
        #[arg(long = "trial-preds")]
        trial_preds: Vec<String>,
    },
    /// Spectrum, intrinsic dimension, silhouette, and the JS marginal screen.
    Geometry {
        #[command(flatten)]
        data: DataArgs,
        /// Activation dump directory (manifest.txt plus matrix CSVs).
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// TwoNN tail-trim fraction.
        #[arg(long, default_value_t = 0.0)]
        trim: f64,
        /// JS tolerances for the marginal screen, comma-separated.
        #[arg(long)]
        js_tau: Option<String>,
    },
    /// Linear probe on dataset features or dumped representations.
    Probe {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        regularization: f64,
    },
    /// Accuracy + calibration for the surrogate readout family.
    ReadoutGrid {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long = "readout", default_values_t = [
            "knn5", "prototype", "vote", "soft_knn", "ridge", "probe", "majority"
        ].map(String::from))]
        readouts: Vec<String>,
        /// Directory of model prediction dumps
        /// (`<dataset>_seed<k>_preds.csv`) to grade surrogates against.
        #[arg(long)]
        model_preds: Option<PathBuf>,
        /// Calibration bins.
        #[arg(long, default_value_t = 15)]
        bins: usize,
    },
    /// Paired statistics over a ReportCell CSV.
    Stats {
        /// Input cells.csv.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "delta_pp")]
        metric: String,
        /// Baseline condition name for pairing.
        #[arg(long)]
        baseline: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let section = match &cli.command {
        Command::Toy => "toy",
        Command::Attack { .. } => "attack",
        Command::Invariance { .. } => "invariance",
        Command::Geometry { .. } => "geometry",
        Command::Probe { .. } => "probe",
        Command::ReadoutGrid { .. } => "readout-grid",
        Command::Stats { .. } => "stats",
    };

    if let Some(workers) = cli.workers.or_else(|| {
        config
            .get(section, "workers")
            .and_then(|v| v.parse().ok())
    }) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .ok();
    }

    let output_dir = cli
        .output_dir
        .clone()
        .or_else(|| config.get(section, "output_dir").map(PathBuf::from))
        .or_else(|| std::env::var_os("TABAUDIT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("tabaudit_out"));

    let mut manifest: BTreeMap<String, String> = BTreeMap::new();
    for (k, v) in config.section(section) {
        manifest.insert(format!("config.{k}"), v.to_owned());
    }
    manifest.insert("output_dir".into(), output_dir.display().to_string());

    let common = Common {
        out: RunOutput::create(&output_dir)?,
        manifest: BTreeMap::new(),
    };

    match cli.command {
        Command::Toy => {
            let common = with_manifest(common, manifest);
            commands::run_toy(&common)
        }
        Command::Attack {
            data,
            attacks,
            readouts,
            overrides,
        } => {
            let tables = load_data(&data, &config, section)?;
            let kinds = resolve_attacks(&attacks)?;
            let mut params = AttackParams::default();
            for o in &overrides {
                let (k, v) = o
                    .split_once('=')
                    .ok_or_else(|| anyhow::anyhow!("--set expects key=value, got {o:?}"))?;
                params.set(k, v)?;
            }
            record_data_args(&mut manifest, &data, &kinds, &readouts, &overrides);
            let common = with_manifest(common, manifest);
            commands::run_attack(
                &common,
                &tables,
                &readouts,
                &kinds,
                &params,
                &seed_list(data.seeds),
                data.context_frac,
                data.context_rows,
            )
        }
        Command::Invariance {
            data,
            readout,
            trials,
            axes,
            tolerance,
            baseline_preds,
            trial_preds,
        } => {
            manifest.insert("readout".into(), readout.clone());
            manifest.insert("trials".into(), trials.to_string());
            manifest.insert("axes".into(), axes.clone());
            manifest.insert("tolerance".into(), tolerance.to_string());
            let common = with_manifest(common, manifest);
            if let Some(base) = baseline_preds {
                return commands::run_invariance_external(
                    &common,
                    &base,
                    &trial_preds,
                    tolerance,
                );
            }
            let tables = load_data(&data, &config, section)?;
            let axes = parse_axes(&axes)?;
            commands::run_invariance(
                &common,
                &tables,
                &readout,
                &seed_list(data.seeds),
                trials,
                &axes,
                tolerance,
            )
        }
        Command::Geometry {
            data,
            dump_dir,
            trim,
            js_tau,
        } => {
            let tables = if data.datasets.is_empty() && dump_dir.is_some() {
                Vec::new()
            } else {
                load_data(&data, &config, section)?
            };
            let taus: Vec<f64> = match js_tau {
                Some(list) => list
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            manifest.insert("trim".into(), trim.to_string());
            let common = with_manifest(common, manifest);
            commands::run_geometry(&common, &tables, dump_dir.as_deref(), trim, &taus)
        }
        Command::Probe {
            data,
            dump_dir,
            regularization,
        } => {
            let tables = if data.datasets.is_empty() && dump_dir.is_some() {
                Vec::new()
            } else {
                load_data(&data, &config, section)?
            };
            manifest.insert("regularization".into(), regularization.to_string());
            let common = with_manifest(common, manifest);
            commands::run_probe(
                &common,
                &tables,
                dump_dir.as_deref(),
                &seed_list(data.seeds),
                regularization,
                data.context_frac,
            )
        }
        Command::ReadoutGrid {
            data,
            readouts,
            model_preds,
            bins,
        } => {
            let tables = load_data(&data, &config, section)?;
            manifest.insert("readouts".into(), readouts.join(","));
            let common = with_manifest(common, manifest);
            commands::run_readout_grid(
                &common,
                &tables,
                &readouts,
                &seed_list(data.seeds),
                data.context_frac,
                model_preds.as_deref(),
                bins,
            )
        }
        Command::Stats {
            input,
            metric,
            baseline,
            alpha,
            resamples,
            level,
            seed,
        } => {
            manifest.insert("input".into(), input.display().to_string());
            manifest.insert("metric".into(), metric.clone());
            manifest.insert("baseline".into(), baseline.clone());
            let common = with_manifest(common, manifest);
            commands::run_stats(
                &common, &input, &metric, &baseline, alpha, resamples, level, seed,
            )
        }
    }
}

fn with_manifest(mut common: Common, manifest: BTreeMap<String, String>) -> Common {
    common.manifest = manifest;
    common
}

fn seed_list(n: u64) -> Vec<u64> {
    (0..n.max(1)).collect()
}

fn load_data(
    data: &DataArgs,
    config: &RunConfig,
    section: &str,
) -> Result<Vec<tabaudit::data::Table>> {
    let mut specs = data.datasets.clone();
    if specs.is_empty() {
        if let Some(list) = config.get(section, "datasets") {
            specs = list.split(',').map(|s| s.trim().to_owned()).collect();
        }
    }
    if specs.is_empty() {
        bail!("no datasets given (use --dataset or the config file)");
    }
    datasets::load_datasets(&specs, &data.label_column, data.gen_seed, data.regression_label)
}

fn resolve_attacks(names: &[String]) -> Result<Vec<AttackKind>> {
    if names.is_empty() {
        // the full battery, identity excluded
        return Ok(AttackKind::ALL
            .into_iter()
            .filter(|k| *k != AttackKind::Identity)
            .collect());
    }
    names
        .iter()
        .map(|n| {
            AttackKind::by_name(n).ok_or_else(|| anyhow::anyhow!("unknown attack kind {n:?}"))
        })
        .collect()
}

fn parse_axes(list: &str) -> Result<Vec<PermAxis>> {
    list.split(',')
        .map(|a| match a.trim() {
            "row" => Ok(PermAxis::Row),
            "column" => Ok(PermAxis::Column),
            "label" => Ok(PermAxis::Label),
            other => bail!("unknown axis {other:?}"),
        })
        .collect()
}

fn record_data_args(
    manifest: &mut BTreeMap<String, String>,
    data: &DataArgs,
    attacks: &[AttackKind],
    readouts: &[String],
    overrides: &[String],
) {
    manifest.insert("datasets".into(), data.datasets.join(","));
    manifest.insert("seeds".into(), data.seeds.to_string());
    manifest.insert("context_frac".into(), data.context_frac.to_string());
    if let Some(rows) = data.context_rows {
        manifest.insert("context_rows".into(), rows.to_string());
    }
    manifest.insert(
        "attacks".into(),
        attacks.iter().map(|a| a.name()).collect::<Vec<_>>().join(","),
    );
    manifest.insert("readouts".into(), readouts.join(","));
    if !overrides.is_empty() {
        manifest.insert("overrides".into(), overrides.join(","));
    }
}
