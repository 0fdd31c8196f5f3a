//! Compressed sparse row matrices plus the direct symmetric factorization
//! used by the shift-and-invert eigensolver.

mod ldl;
mod ordering;

pub use ldl::{Inertia, SparseLdl};
pub use ordering::nested_dissection;

use nalgebra::DMatrix;

use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed in insertion order, so pushing each symmetric pair in the same
    /// step yields a bitwise symmetric matrix.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n_rows && c < n_cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, exec: Execution, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec_into(exec, x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, exec: Execution, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        par::fill(exec, y, |r| self.row(r).map(|(c, v)| v * x[c]).sum());
    }

    /// `self - sigma I`; every diagonal entry must be stored.
    pub fn shifted(&self, sigma: f64) -> CsrMatrix {
        let mut out = self.clone();
        for r in 0..self.n_rows {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let k = self.col_idx[span.clone()]
                .binary_search(&r)
                .expect("diagonal entry missing");
            out.values[span.start + k] -= sigma;
        }
        out
    }

    /// Infinity norm of `M - Mᵀ`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n_rows)
            .map(|r| {
                self.row(r)
                    .map(|(c, v)| (v - self.get(c, r)).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_and_symmetry() {
        let m = CsrMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 0, 1.0),
                (0, 1, 0.1),
                (1, 0, 0.1),
                (0, 1, 0.2),
                (1, 0, 0.2),
                (2, 2, 3.0),
                (1, 1, 2.0),
            ],
        );
        assert_eq!(m.nnz(), 5);
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert_eq!(m.asymmetry(), 0.0);
        let y = m.mul_vec(Execution::Sequential, &[1.0, 1.0, 1.0]);
        for (a, b) in y.iter().zip([1.3, 2.3, 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let s = m.shifted(1.0);
        assert_eq!(s.get(2, 2), 2.0);
        assert_eq!(s.get(0, 0), 0.0);
    }
}
