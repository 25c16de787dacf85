//! Surrogate readout rules and baselines.
//!
//! Every readout produces a [`ProbabilityMatrix`] — one distribution per
//! query row — so votes, prototypes, neighbor rules, linear heads, and
//! external prediction dumps all flow through the same comparison machinery.

mod classifier;
mod distance;
mod knn;
mod linear;
mod majority;
mod ova;
mod prob;
mod prototype;
mod ridge;
mod verdict;
mod vote;

pub use classifier::{
    accuracy, readout_by_name, KnnClassifier, MajorityClassifier, OvaClassifier,
    ProbeClassifier, PrototypeClassifier, RidgeClassifier, SoftKnnClassifier,
    SoftVoteClassifier, TableClassifier,
};
pub use distance::{cosine as distance_cosine, l2 as distance_l2, Metric};
pub use knn::{knn_classify, soft_knn, SoftKnnFit};
pub use linear::{linear_probe, ProbeFit};
pub use majority::majority_baseline;
pub use ova::ova_wrap;
pub use prob::{AttentionTensor, ProbabilityMatrix};
pub use prototype::prototype_classify;
pub use ridge::{ridge_fit, RidgeModel, RidgeTargets};
pub use verdict::{surrogate_verdict, SurrogateVerdict, VerdictThresholds};
pub use vote::attention_vote;

/// Errors raised by the readout family.
#[derive(Debug, thiserror::Error)]
pub enum ReadoutError {
    #[error("label vector length {labels} does not match context size {context}")]
    LabelSizeMismatch { labels: usize, context: usize },
    #[error("class {0} has no context rows")]
    EmptyClass(usize),
    #[error("zero-norm vector under cosine distance")]
    ZeroNorm,
    #[error("k={k} exceeds context size {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("context covariance is singular even after shrinkage")]
    SingularCovariance,
    #[error("training fold holds a single class")]
    SingleClassTrain,
    #[error("temperature grid must be non-empty and positive")]
    BadTemperatureGrid,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("probability row {row} sums to {sum}, expected 1")]
    BadProbabilityRow { row: usize, sum: f64 },
    #[error("attention row (head {head}, query {query}) sums to {sum}, expected 1")]
    BadAttentionRow { head: usize, query: usize, sum: f64 },
    #[error("One-vs-All base classifier failed on class {class}: {source}")]
    OvaBase {
        class: usize,
        source: Box<ReadoutError>,
    },
    #[error("unknown readout name {0:?}")]
    UnknownReadout(String),
    #[error("classification table required")]
    NeedsLabels,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
