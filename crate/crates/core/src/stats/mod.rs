//! Paired statistics: aggregation, bootstrap, permutation nulls, multiple
//! comparisons, rank tests, association, and calibration.

mod aggregate;
mod association;
mod bootstrap;
mod calibration;
mod correction;
mod normal;
mod permutation;
mod wilcoxon;

pub use aggregate::{dataset_aggregate, AggregateGroup};
pub use association::{cohen_kappa, correlation, CorrelationKind, KappaResult};
pub use bootstrap::paired_bootstrap_ci;
pub use calibration::{calibration, Calibration};
pub use correction::{bh_fdr, bonferroni, holm};
pub use permutation::{permutation_null_z, PermutationNull};
pub use wilcoxon::{wilcoxon_signed_rank, Side, WilcoxonResult};

/// Errors raised by the statistics toolbox.
#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("empty report")]
    Empty,
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("zero variance: correlation undefined")]
    ZeroVariance,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}
