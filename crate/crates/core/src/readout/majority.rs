//! Majority-class baseline.

use crate::data::Matrix;

use super::{ProbabilityMatrix, ReadoutError};

/// Constant prediction of the context class frequencies; the argmax is the
/// most frequent class, ties resolved to the lowest index.
pub fn majority_baseline(
    context_labels: &[usize],
    n_queries: usize,
) -> Result<ProbabilityMatrix, ReadoutError> {
    if context_labels.is_empty() {
        return Err(ReadoutError::Shape("empty context labels".into()));
    }
    let classes = context_labels.iter().max().map_or(0, |m| m + 1);
    let mut freq = vec![0.0; classes];
    for &y in context_labels {
        freq[y] += 1.0 / context_labels.len() as f64;
    }
    let mut rows = Matrix::zeros(n_queries, classes);
    for i in 0..n_queries {
        for (c, &f) in freq.iter().enumerate() {
            rows.set(i, c, f);
        }
    }
    ProbabilityMatrix::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_class_wins() {
        let p = majority_baseline(&[0, 0, 1], 3).unwrap();
        assert!(p.argmax_all().iter().all(|&c| c == 0));
    }

    #[test]
    fn balanced_binary_breaks_to_class_zero() {
        let p = majority_baseline(&[0, 1, 0, 1], 2).unwrap();
        assert!(p.argmax_all().iter().all(|&c| c == 0));
    }
}
