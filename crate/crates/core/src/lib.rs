//! Mechanistic audit toolbox for tabular in-context learners.
//!
//! The crate bundles the desk-scale machinery needed to audit similarity-based
//! readouts of tabular foundation models without touching any released
//! checkpoint:
//!
//! * [`data`] — tables, CSV ingestion, ordinal encoding and imputation,
//!   stratified splits, seeded synthetic generators, and the activation-dump
//!   ingestion format for externally produced representation matrices.
//! * [`toy`] — hand-crafted single-attention-layer models M0–M3 on boolean
//!   tasks, the orbit-majority expressiveness bound, and the attention-mode
//!   ablation grid, all in exact rational arithmetic.
//! * [`readout`] — the surrogate readout family: attention-weighted vote,
//!   nearest prototype, kNN, soft-kNN, linear probe, ridge, majority baseline,
//!   the One-vs-All wrapper, and the faithful-surrogate verdict.
//! * [`geometry`] — effective rank, participation ratio, TwoNN intrinsic
//!   dimension, silhouette, and the Jensen–Shannon column-marginal screen.
//! * [`invariance`] — row/column/label permutation trials, agreement reports,
//!   and best/worst accuracy spread.
//! * [`attack`] — the context-set perturbation battery (noise padding, hub and
//!   boundary label poisoning, centroid injection, monotone warps, SVD hiding,
//!   null-space PGD) with provenance-reversible instances.
//! * [`stats`] — paired bootstrap CIs, permutation nulls, Holm / Bonferroni /
//!   Benjamini–Hochberg corrections, Wilcoxon signed-rank, correlation and
//!   agreement coefficients, and calibration metrics.
//! * [`report`] — the `ReportCell` measurement unit and its CSV/JSON forms.
//!
//! Everything is deterministic given `(inputs, seed)`: random draws go through
//! the cell-keyed streams of [`rng`], so grids can run in parallel without
//! changing a single output byte.

pub mod attack;
pub mod data;
pub mod geometry;
pub mod invariance;
pub mod readout;
pub mod report;
pub mod rng;
pub mod stats;
pub mod toy;

pub use data::{ColumnKind, Split, Table};
pub use readout::ProbabilityMatrix;
pub use report::ReportCell;
