//! Up-looking sparse `L D Lᵀ` factorization without pivoting.
//!
//! The symbolic phase builds the elimination tree and column counts; the
//! numeric phase computes one row of `L` at a time by a sparse triangular
//! solve whose pattern is read off the tree. No pivoting is performed, so
//! the matrix must admit the factorization in the given ordering; for a
//! shifted SPD matrix that only fails when the shift hits an eigenvalue of a
//! leading block, which is reported as a zero pivot.

use crate::error::{Error, Result};

use super::CsrMatrix;

/// Sylvester inertia of a factorized symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Clone, Debug)]
pub struct SparseLdl {
    n: usize,
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

impl SparseLdl {
    /// Factorizes `P A Pᵀ` where `perm[new] = old`. `a` must be structurally
    /// and numerically symmetric with both triangles stored.
    pub fn factor(a: &CsrMatrix, perm: &[usize]) -> Result<Self> {
        let n = a.n_rows;
        if a.n_cols != n || perm.len() != n {
            return Err(Error::Parameter(
                "LDL needs a square matrix and a full permutation".into(),
            ));
        }
        let mut pinv = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }
        if pinv.contains(&usize::MAX) {
            return Err(Error::Parameter("ordering is not a permutation".into()));
        }

        // Symbolic: elimination tree and column counts of L.
        let none = usize::MAX;
        let mut parent = vec![none; n];
        let mut flag = vec![none; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (c, _) in a.row(perm[k]) {
                let mut i = pinv[c];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == none {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for k in 0..n {
            col_ptr[k + 1] = col_ptr[k] + lnz[k];
        }
        let total = col_ptr[n];

        // Numeric.
        let mut row_idx = vec![0u32; total];
        let mut lx = vec![0.0f64; total];
        let mut d = vec![0.0f64; n];
        let mut y = vec![0.0f64; n];
        let mut pattern = vec![0usize; n];
        lnz.iter_mut().for_each(|l| *l = 0);
        flag.iter_mut().for_each(|f| *f = none);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for (c, v) in a.row(perm[k]) {
                let mut i = pinv[c];
                if i <= k {
                    y[i] += v;
                    let mut len = 0;
                    while flag[i] != k {
                        pattern[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        pattern[top] = pattern[len];
                    }
                }
            }
            let mut dk = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = col_ptr[i];
                let end = start + lnz[i];
                for p in start..end {
                    y[row_idx[p] as usize] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                dk -= lki * yi;
                row_idx[end] = k as u32;
                lx[end] = lki;
                lnz[i] += 1;
            }
            if dk == 0.0 || !dk.is_finite() {
                return Err(Error::Solver(format!("zero pivot at step {k} of {n}")));
            }
            d[k] = dk;
        }
        Ok(SparseLdl {
            n,
            perm: perm.to_vec(),
            col_ptr,
            row_idx,
            lx,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored nonzeros of the unit lower factor (diagonal excluded).
    pub fn factor_nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn inertia(&self) -> Inertia {
        let negative = self.d.iter().filter(|&&v| v < 0.0).count();
        let zero = self.d.iter().filter(|&&v| v == 0.0).count();
        Inertia {
            negative,
            zero,
            positive: self.n - negative - zero,
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    x[self.row_idx[p] as usize] -= self.lx[p] * xj;
                }
            }
        }
        for (xj, dj) in x.iter_mut().zip(&self.d) {
            *xj /= dj;
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                s -= self.lx[p] * x[self.row_idx[p] as usize];
            }
            x[j] = s;
        }
        let mut out = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::nested_dissection;

    fn laplacian(m: usize) -> (CsrMatrix, Vec<(i64, i64)>) {
        let idx = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        let mut coords = Vec::new();
        for i in 0..m {
            for j in 0..m {
                coords.push((i as i64, j as i64));
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        (CsrMatrix::from_triplets(m * m, m * m, t), coords)
    }

    #[test]
    fn solves_and_counts_inertia() {
        let m = 15;
        let (a, coords) = laplacian(m);
        let perm = nested_dissection(&coords);
        let dense = a.to_dense();
        let eig = nalgebra::SymmetricEigen::new(dense.clone());
        for sigma in [0.0, 1.3, 4.7] {
            let shifted = a.shifted(sigma);
            let f = SparseLdl::factor(&shifted, &perm).unwrap();
            let b: Vec<f64> = (0..m * m).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
            let x = f.solve(&b);
            let r = shifted.mul_vec(crate::par::Execution::Sequential, &x);
            let err = r
                .iter()
                .zip(&b)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "residual {err}");
            let below = eig.eigenvalues.iter().filter(|&&l| l < sigma).count();
            assert_eq!(f.inertia().negative, below);
        }
    }
}
