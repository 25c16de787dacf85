//! Row-major dense matrix and per-column standardization.
//!
//! Tables and representation dumps are row collections, so the crate keeps
//! them row-major and converts to `nalgebra` only for decompositions.

use nalgebra::DMatrix;

use super::DataError;

/// Row-major `f64` matrix. `NaN` entries mark missing values prior to
/// imputation; every downstream consumer requires them gone.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, DataError> {
        if data.len() != rows * cols {
            return Err(DataError::Shape(format!(
                "expected {rows}x{cols}={} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DataError> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(DataError::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: n,
            cols: d,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, DataError> {
        if self.cols != other.cols {
            return Err(DataError::Shape("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn has_missing(&self) -> bool {
        self.data.iter().any(|v| v.is_nan())
    }

    pub fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.rows, self.cols, self.data.iter().copied())
    }

    pub fn from_na(m: &DMatrix<f64>) -> Matrix {
        Matrix {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().as_slice().to_vec(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Sum after sorting the addends, so the result depends only on the
/// multiset of values, never on their order. The exact-invariance claims of
/// the harness (column permutations of kNN/prototype inputs, context-row
/// permutations) rest on this.
pub fn stable_sum(addends: &mut [f64]) -> f64 {
    addends.sort_by(f64::total_cmp);
    addends.iter().sum()
}

/// Per-column affine map to zero mean and unit variance, fitted once and
/// applied elsewhere. Columns with zero variance keep scale 1 so the map
/// stays invertible.
#[derive(Debug, Clone)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Fit on the rows of `m` (population standard deviation). Column
    /// statistics are accumulated order-independently.
    pub fn fit(m: &Matrix) -> Standardizer {
        let n = m.n_rows().max(1) as f64;
        let d = m.n_cols();
        let mut means = Vec::with_capacity(d);
        let mut stds = Vec::with_capacity(d);
        for j in 0..d {
            let mut col = m.column(j);
            let mean = stable_sum(&mut col) / n;
            let mut sq: Vec<f64> = m
                .column(j)
                .iter()
                .map(|v| (v - mean) * (v - mean))
                .collect();
            let s = (stable_sum(&mut sq) / n).sqrt();
            means.push(mean);
            stds.push(if s > 0.0 { s } else { 1.0 });
        }
        Standardizer { means, stds }
    }

    pub fn transform(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        for i in 0..out.n_rows() {
            let row = out.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.means[j]) / self.stds[j];
            }
        }
        out
    }

    pub fn inverse_transform(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        for i in 0..out.n_rows() {
            let row = out.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v * self.stds[j] + self.means[j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn na_round_trip() {
        let m = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let back = Matrix::from_na(&m.to_na());
        assert_eq!(m, back);
        assert_eq!(m.to_na()[(1, 2)], 6.0);
    }

    #[test]
    fn standardizer_centers_and_scales() {
        let m = Matrix::new(4, 2, vec![1.0, 10.0, 2.0, 10.0, 3.0, 10.0, 4.0, 10.0]).unwrap();
        let s = Standardizer::fit(&m);
        let t = s.transform(&m);
        let col0: f64 = (0..4).map(|i| t.get(i, 0)).sum();
        assert_abs_diff_eq!(col0, 0.0, epsilon = 1e-12);
        // constant column passes through centered with unit scale
        assert_eq!(t.get(0, 1), 0.0);
        let back = s.inverse_transform(&t);
        for i in 0..4 {
            for j in 0..2 {
                assert_abs_diff_eq!(back.get(i, j), m.get(i, j), epsilon = 1e-12);
            }
        }
    }
}
