use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::rational::{self, Ratio};

/// Row-major sparse matrix of exact rationals with a cached `f64` copy.
/// Rows hold `(column, value)` pairs sorted by column, zeros omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Ratio)>>,
    approx: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    /// Entries may arrive unsorted and with duplicates; duplicates are summed.
    pub fn from_rows(rows: usize, cols: usize, mut data: Vec<Vec<(usize, Ratio)>>) -> Self {
        assert_eq!(data.len(), rows);
        for row in &mut data {
            row.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(usize, Ratio)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                assert!(c < cols, "column {c} out of range {cols}");
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *row = merged;
        }
        let approx = data
            .iter()
            .map(|row| row.iter().map(|(c, v)| (*c, rational::to_f64(v))).collect())
            .collect();
        SparseMatrix { rows, cols, data, approx }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, n, (0..n).map(|i| vec![(i, Ratio::one())]).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Ratio)] {
        &self.data[i]
    }

    pub fn row_f64(&self, i: usize) -> &[(usize, f64)] {
        &self.approx[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Ratio {
        match self.data[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) => self.data[i][pos].1.clone(),
            Err(_) => Ratio::zero(),
        }
    }

    pub fn row_sum(&self, i: usize) -> Ratio {
        self.data[i].iter().fold(Ratio::zero(), |a, (_, v)| a + v)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out[*j].push((i, v.clone()));
            }
        }
        SparseMatrix::from_rows(self.cols, self.rows, out)
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let data = crate::par::map_range(self.rows, |i| {
            let mut acc: Vec<(usize, Ratio)> = Vec::new();
            for (k, a) in &self.data[i] {
                for (j, b) in &other.data[*k] {
                    acc.push((*j, a * b));
                }
            }
            acc
        });
        SparseMatrix::from_rows(self.rows, other.cols, data)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = (0..self.rows)
            .map(|i| {
                let mut row = self.data[i].clone();
                row.extend(other.data[i].iter().map(|(c, v)| (*c, -v)));
                row
            })
            .collect();
        SparseMatrix::from_rows(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: &Ratio) -> SparseMatrix {
        let data = self.data.iter().map(|row| row.iter().map(|(c, v)| (*c, v * s)).collect()).collect();
        SparseMatrix::from_rows(self.rows, self.cols, data)
    }

    /// `diag(left) * self * diag(right)`.
    pub fn diag_scale(&self, left: &[Ratio], right: &[Ratio]) -> SparseMatrix {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|(c, v)| (*c, &left[i] * v * &right[*c])).collect())
            .collect();
        SparseMatrix::from_rows(self.rows, self.cols, data)
    }

    /// `M v` in double precision.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        self.approx.iter().map(|row| row.iter().map(|(c, x)| x * v[*c]).sum()).collect()
    }

    /// `M^T v` in double precision.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, row) in self.approx.iter().enumerate() {
            for (c, x) in row {
                out[*c] += x * v[i];
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.approx.iter().enumerate() {
            for (c, x) in row {
                m[(i, *c)] = *x;
            }
        }
        m
    }
}
