//! Banded LU factorisation with partial pivoting.
//!
//! Storage follows the LAPACK `gbtrf` layout idea: each row keeps the entries
//! from `kl` left of the diagonal to `ku + kl` right of it, which leaves room
//! for the fill created by row interchanges.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bands(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    /// Set entry `(i, j)`, which must lie inside the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j + self.kl >= i && j <= i + self.ku);
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    pub fn from_dense(n: usize, a: &[f64]) -> Self {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..n {
            for j in 0..n {
                if a[i * n + j] != 0.0 {
                    if i > j {
                        kl = kl.max(i - j);
                    } else {
                        ku = ku.max(j - i);
                    }
                }
            }
        }
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                m.set(i, j, a[i * n + j]);
            }
        }
        m
    }

    /// Factor with partial pivoting; `patch` identifies the matrix in errors.
    pub fn factor(self, patch: usize) -> Result<BandedLu<f64>> {
        let (n, kl, ku, width) = (self.n, self.kl, self.ku, self.width);
        let (data, piv) = self.factor_in_place(patch)?;
        Ok(BandedLu {
            n,
            kl,
            ku,
            width,
            data,
            piv,
        })
    }

    /// As [`factor`](Self::factor), then round the factors to single
    /// precision. The factorisation itself runs in double precision; only
    /// storage is rounded, which halves the memory traffic of a solve. Meant
    /// for preconditioners, where the rounding perturbs the preconditioned
    /// operator but not the solution the Krylov method converges to.
    pub fn factor_single(self, patch: usize) -> Result<BandedLu<f32>> {
        let (n, kl, ku, width) = (self.n, self.kl, self.ku, self.width);
        let (data, piv) = self.factor_in_place(patch)?;
        Ok(BandedLu {
            n,
            kl,
            ku,
            width,
            data: data.iter().map(|&v| v as f32).collect(),
            piv,
        })
    }

    fn factor_in_place(mut self, patch: usize) -> Result<(Vec<f64>, Vec<usize>)> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut piv = vec![0; n];
        let reach = ku + kl;
        for k in 0..n {
            let last = (k + kl + 1).min(n);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for i in k + 1..last {
                let v = self.data[self.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularPatch { patch, pivot: k });
            }
            let jend = (k + reach + 1).min(n);
            if p != k {
                for j in k..jend {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let rk = self.idx(k, k);
            let d = self.data[rk];
            let len = jend - k;
            // Rows below k start where row k ends, so the two slices are disjoint.
            let split = (k + 1) * self.width;
            let (head, tail) = self.data.split_at_mut(split);
            let pivot_row = &head[rk + 1..rk + len];
            for i in k + 1..last {
                let ri = i * self.width + (k + kl - i) - split;
                let l = tail[ri] / d;
                tail[ri] = l;
                if l == 0.0 {
                    continue;
                }
                for (x, y) in tail[ri + 1..ri + len].iter_mut().zip(pivot_row) {
                    *x -= l * y;
                }
            }
        }
        Ok((self.data, piv))
    }
}

/// LU factors of a banded matrix, stored as `T` (`f64` or `f32`).
#[derive(Debug, Clone)]
pub struct BandedLu<T = f64> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Copy + Into<f64>> BandedLu<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    /// Solve in place.
    pub fn solve(&self, b: &mut [f64]) {
        let m = self;
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        let w = m.width;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                // Multipliers of column k sit one stride minus one apart.
                let mut idx = m.idx(k, k);
                for bi in b[k + 1..(k + kl + 1).min(n)].iter_mut() {
                    idx += w - 1;
                    *bi -= m.data[idx].into() * bk;
                }
            }
        }
        let reach = ku + kl;
        for i in (0..n).rev() {
            let ri = m.idx(i, i);
            let len = (i + reach + 1).min(n) - i;
            let dot: f64 = m.data[ri + 1..ri + len]
                .iter()
                .zip(&b[i + 1..i + len])
                .map(|(&a, x)| a.into() * x)
                .sum();
            b[i] = (b[i] - dot) / m.data[ri].into();
        }
    }
}
