//! Representation-geometry metrics for any ingested activation matrix.

mod marginals;
mod silhouette;
mod spectrum;
mod twonn;

pub use marginals::{js_marginal_screen, MarginalScreen};
pub use silhouette::{silhouette, SilhouetteResult};
pub use spectrum::{effective_rank, participation_ratio, spectrum_summary, SpectrumSummary};
pub use twonn::{twonn_intrinsic_dimension, TwoNnResult};

/// Errors raised by the geometry metrics.
#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("need at least two classes")]
    NeedsTwoClasses,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("metric not supported here: {0}")]
    UnsupportedMetric(String),
    #[error("labels length {0} does not match point count {1}")]
    LabelMismatch(usize, usize),
}
