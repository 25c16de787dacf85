//! Permutation-invariance harness: apply row/column/label permutations,
//! measure prediction drift and agreement, and report best/worst spread.

mod agreement;
mod grid;
mod permutation;

pub use agreement::{agreement, external_agreement, spread, AgreementReport, Spread};
pub use grid::{invariance_grid, AxisSummary, InvarianceGridReport, TrialOutcome};
pub use permutation::{apply_permutation, PermAxis, PermutationTrial};

/// Default probability-agreement tolerance.
pub const DEFAULT_TOLERANCE: f64 = 0.005;

/// Errors raised by the invariance harness.
#[derive(Debug, thiserror::Error)]
pub enum InvarianceError {
    #[error("permutation is not a bijection on 0..{expected}")]
    NotABijection { expected: usize },
    #[error("label permutations require a classification table")]
    NeedsLabels,
    #[error("shape mismatch between baseline and trial probabilities")]
    ShapeMismatch,
    #[error("need at least two accuracies for a spread")]
    TooFewTrials,
    #[error("classifier failed on axis {axis:?}, seed {seed}, trial {trial}: {source}")]
    Classifier {
        axis: PermAxis,
        seed: u64,
        trial: usize,
        source: crate::readout::ReadoutError,
    },
    #[error("data error: {0}")]
    Data(#[from] crate::data::DataError),
    #[error("readout error: {0}")]
    Readout(#[from] crate::readout::ReadoutError),
}
