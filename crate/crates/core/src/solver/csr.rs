//! Compressed sparse row matrices with a fixed sparsity pattern.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build a zero matrix with the given (unsorted, possibly repeated) row patterns.
    pub fn from_pattern(nrows: usize, ncols: usize, mut rows: Vec<Vec<usize>>) -> Self {
        assert_eq!(rows.len(), nrows);
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Build from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for &(r, c, _) in triplets {
            rows[r].push(c);
        }
        let mut m = Self::from_pattern(nrows, ncols, rows);
        for &(r, c, v) in triplets {
            m.add(r, c, v);
        }
        m
    }

    pub fn from_dense(nrows: usize, ncols: usize, a: &[f64]) -> Self {
        let mut t = Vec::new();
        for i in 0..nrows {
            for j in 0..ncols {
                if a[i * ncols + j] != 0.0 {
                    t.push((i, j, a[i * ncols + j]));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &t)
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }
    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }
    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    /// Position of entry `(i, j)` in the value array, if it is in the pattern.
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[a..b].binary_search(&j).ok().map(|p| a + p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Add to an entry of the pattern; panics if `(i, j)` is outside it.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) not in sparsity pattern"));
        self.values[p] += v;
    }

    pub fn fill_zero(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Replace row and column `i` by the identity.
    pub fn set_identity_rows_cols(&mut self, dofs: &[usize]) {
        let mut mark = vec![false; self.nrows.max(self.ncols)];
        for &d in dofs {
            mark[d] = true;
        }
        for i in 0..self.nrows {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            for p in a..b {
                let j = self.col_idx[p];
                if mark[i] || mark[j] {
                    self.values[p] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        y.par_chunks_mut(256).enumerate().for_each(|(chunk, ys)| {
            let base = chunk * 256;
            for (o, yi) in ys.iter_mut().enumerate() {
                let (cols, vals) = self.row(base + o);
                let mut s = 0.0;
                for (c, v) in cols.iter().zip(vals) {
                    s += v * x[*c];
                }
                *yi = s;
            }
        });
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                t.push((*c, i, *v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                a[i * self.ncols + c] += v;
            }
        }
        a
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Extract the square submatrix on the sorted index list `idx` as dense row-major.
    pub fn submatrix_dense(&self, idx: &[usize]) -> Vec<f64> {
        let n = idx.len();
        let mut a = vec![0.0; n * n];
        for (li, &gi) in idx.iter().enumerate() {
            let (cols, vals) = self.row(gi);
            for (c, v) in cols.iter().zip(vals) {
                if let Ok(lj) = idx.binary_search(c) {
                    a[li * n + lj] = *v;
                }
            }
        }
        a
    }

    pub fn check_square(&self, n: usize) -> Result<()> {
        if self.nrows != n || self.ncols != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.nrows,
            });
        }
        Ok(())
    }
}
