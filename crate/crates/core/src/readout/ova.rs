//! One-vs-All wrapper: exact class-order invariance for any base rule.

use crate::data::{Matrix, Split, Table};

use super::classifier::TableClassifier;
use super::{ProbabilityMatrix, ReadoutError};

/// Run `base` once per class on the binary relabeling `c` vs. rest, collect
/// the positive-class scores, and normalize them into a distribution.
///
/// Because each binary subproblem is untouched by how the *other* classes
/// are indexed, the wrapped argmax is exactly invariant to class-index
/// permutations. Base failures propagate with the class index attached.
pub fn ova_wrap(
    base: &dyn TableClassifier,
    table: &Table,
    split: &Split,
) -> Result<ProbabilityMatrix, ReadoutError> {
    let labels = table.labels().ok_or(ReadoutError::NeedsLabels)?;
    let classes = table.class_count();
    if classes < 2 {
        return Err(ReadoutError::Shape("One-vs-All needs >= 2 classes".into()));
    }
    let q = split.query_idx.len();
    let mut scores = Matrix::zeros(q, classes);
    for c in 0..classes {
        let binary: Vec<usize> = labels.iter().map(|&y| usize::from(y == c)).collect();
        let relabeled = table
            .with_labels(binary)
            .map_err(|e| ReadoutError::Shape(e.to_string()))?;
        let probs = base.classify(&relabeled, split).map_err(|e| ReadoutError::OvaBase {
            class: c,
            source: Box::new(e),
        })?;
        for i in 0..q {
            scores.set(i, c, probs.get(i, 1));
        }
    }
    ProbabilityMatrix::from_scores(scores)
}
