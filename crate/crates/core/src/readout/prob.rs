//! Probability matrices and attention tensors.

use std::path::Path;

use crate::data::Matrix;

use super::ReadoutError;

/// Per-query class distributions: a `q x C` matrix whose rows sum to 1
/// within `1e-9` with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    probs: Matrix,
}

impl ProbabilityMatrix {
    pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(probs: Matrix) -> Result<Self, ReadoutError> {
        for i in 0..probs.n_rows() {
            let row = probs.row(i);
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > Self::ROW_SUM_TOLERANCE
                || row.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p))
            {
                return Err(ReadoutError::BadProbabilityRow { row: i, sum });
            }
        }
        Ok(Self { probs })
    }

    /// Build from non-negative scores, normalizing each row; zero-sum rows
    /// become uniform.
    pub fn from_scores(mut scores: Matrix) -> Result<Self, ReadoutError> {
        let c = scores.n_cols();
        if c == 0 {
            return Err(ReadoutError::Shape("no classes".into()));
        }
        for i in 0..scores.n_rows() {
            let row = scores.row_mut(i);
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                for p in row.iter_mut() {
                    *p /= sum;
                }
            } else {
                for p in row.iter_mut() {
                    *p = 1.0 / c as f64;
                }
            }
        }
        Self::new(scores)
    }

    pub fn uniform(queries: usize, classes: usize) -> Self {
        let m = Matrix::new(
            queries,
            classes,
            vec![1.0 / classes as f64; queries * classes],
        )
        .expect("shape by construction");
        Self { probs: m }
    }

    pub fn n_queries(&self) -> usize {
        self.probs.n_rows()
    }

    pub fn class_count(&self) -> usize {
        self.probs.n_cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.probs.row(i)
    }

    pub fn get(&self, i: usize, c: usize) -> f64 {
        self.probs.get(i, c)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.probs
    }

    /// Argmax label of a row; exact ties go to the lowest class index.
    pub fn argmax(&self, i: usize) -> usize {
        let row = self.probs.row(i);
        let mut best = 0;
        for (c, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = c;
            }
        }
        best
    }

    pub fn argmax_all(&self) -> Vec<usize> {
        (0..self.n_queries()).map(|i| self.argmax(i)).collect()
    }

    /// Flatten row-major: the vector Pearson correlations run over.
    pub fn flattened(&self) -> &[f64] {
        self.probs.as_slice()
    }

    /// Reorder class columns: output class `c` takes the current column
    /// `perm[c]`. Used to undo label permutations.
    pub fn permute_classes(&self, perm: &[usize]) -> Result<Self, ReadoutError> {
        if perm.len() != self.class_count() {
            return Err(ReadoutError::Shape("class permutation length".into()));
        }
        let mut out = Matrix::zeros(self.n_queries(), self.class_count());
        for i in 0..self.n_queries() {
            for (c, &src) in perm.iter().enumerate() {
                out.set(i, c, self.get(i, src));
            }
        }
        Self::new(out)
    }

    /// Load per-query rows from a headerless CSV (external prediction dumps).
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, ReadoutError> {
        let text = std::fs::read_to_string(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> =
                line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            rows.push(row.map_err(|e| ReadoutError::Shape(format!("bad cell: {e}")))?);
        }
        let m = Matrix::from_rows(&rows)
            .map_err(|e| ReadoutError::Shape(e.to_string()))?;
        Self::new(m)
    }
}

/// Non-negative attention weights, heads x queries x context rows; each
/// `(head, query)` row sums to 1 within `1e-6`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionTensor {
    heads: Vec<Matrix>,
}

impl AttentionTensor {
    pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

    pub fn new(heads: Vec<Matrix>) -> Result<Self, ReadoutError> {
        if heads.is_empty() {
            return Err(ReadoutError::Shape("attention tensor needs >= 1 head".into()));
        }
        let (q, n) = (heads[0].n_rows(), heads[0].n_cols());
        for (h, m) in heads.iter().enumerate() {
            if m.n_rows() != q || m.n_cols() != n {
                return Err(ReadoutError::Shape("ragged attention heads".into()));
            }
            for i in 0..q {
                let row = m.row(i);
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > Self::ROW_SUM_TOLERANCE || row.iter().any(|&w| w < 0.0) {
                    return Err(ReadoutError::BadAttentionRow {
                        head: h,
                        query: i,
                        sum,
                    });
                }
            }
        }
        Ok(Self { heads })
    }

    pub fn n_heads(&self) -> usize {
        self.heads.len()
    }

    pub fn n_queries(&self) -> usize {
        self.heads[0].n_rows()
    }

    pub fn n_context(&self) -> usize {
        self.heads[0].n_cols()
    }

    pub fn head(&self, h: usize) -> &Matrix {
        &self.heads[h]
    }
}
