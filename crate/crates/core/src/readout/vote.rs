//! Head-averaged attention-weighted label vote.

use crate::data::Matrix;

use super::{AttentionTensor, ProbabilityMatrix, ReadoutError};

/// `p(c) = (1/H) sum_h sum_i alpha_i^(h) [y_i = c]`.
///
/// Rows sum to 1 automatically because each head's attention row does.
pub fn attention_vote(
    attn: &AttentionTensor,
    context_labels: &[usize],
) -> Result<ProbabilityMatrix, ReadoutError> {
    if context_labels.len() != attn.n_context() {
        return Err(ReadoutError::LabelSizeMismatch {
            labels: context_labels.len(),
            context: attn.n_context(),
        });
    }
    let classes = context_labels.iter().max().map_or(0, |m| m + 1);
    let q = attn.n_queries();
    let h = attn.n_heads() as f64;
    let mut probs = Matrix::zeros(q, classes);
    for head in 0..attn.n_heads() {
        let w = attn.head(head);
        for i in 0..q {
            for (ctx, &y) in context_labels.iter().enumerate() {
                let add = w.get(i, ctx) / h;
                probs.set(i, y, probs.get(i, y) + add);
            }
        }
    }
    ProbabilityMatrix::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uniform_head(q: usize, n: usize) -> Matrix {
        Matrix::new(q, n, vec![1.0 / n as f64; q * n]).unwrap()
    }

    fn one_hot_head(q: usize, n: usize, on: usize) -> Matrix {
        let mut m = Matrix::zeros(q, n);
        for i in 0..q {
            m.set(i, on, 1.0);
        }
        m
    }

    #[test]
    fn uniform_attention_votes_class_frequencies() {
        let attn = AttentionTensor::new(vec![uniform_head(2, 3)]).unwrap();
        let p = attention_vote(&attn, &[0, 0, 1]).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(p.get(i, 0), 2.0 / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.get(i, 1), 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_attention_copies_the_attended_label() {
        let attn = AttentionTensor::new(vec![one_hot_head(1, 3, 2)]).unwrap();
        let p = attention_vote(&attn, &[0, 0, 1]).unwrap();
        assert_eq!(p.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn heads_average() {
        let attn =
            AttentionTensor::new(vec![one_hot_head(1, 2, 0), one_hot_head(1, 2, 1)]).unwrap();
        let p = attention_vote(&attn, &[0, 1]).unwrap();
        assert_eq!(p.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn size_mismatch_rejected() {
        let attn = AttentionTensor::new(vec![uniform_head(1, 3)]).unwrap();
        assert!(matches!(
            attention_vote(&attn, &[0, 1]),
            Err(ReadoutError::LabelSizeMismatch { .. })
        ));
    }
}
