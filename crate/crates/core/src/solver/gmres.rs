//! Restarted, right-preconditioned GMRES with modified Gram–Schmidt.

use crate::error::{Error, Result};
use crate::solver::csr::CsrMatrix;

/// Something that can be multiplied with a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// Approximate inverse applied as `z = M^{-1} r`.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Diagonal scaling by the inverse matrix diagonal.
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(a: &CsrMatrix) -> Self {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        JacobiPreconditioner { inv_diag }
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * d;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub restart: usize,
    pub max_its: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            tol_rel: 1e-6,
            tol_abs: 0.0,
            restart: 50,
            max_its: 1000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GmresStats {
    pub iterations: usize,
    pub residual_norm: f64,
    pub rhs_norm: f64,
    /// Residual estimate after every iteration (including the initial one).
    pub history: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `A x = b` starting from the contents of `x`.
///
/// Stops when `||b - A x|| <= max(tol_rel ||b||, tol_abs)`. On failure `x` holds
/// the best iterate found and the error carries the achieved residual.
pub fn gmres<A: LinearOperator + ?Sized, P: Preconditioner + ?Sized>(
    a: &A,
    b: &[f64],
    x: &mut [f64],
    pc: &P,
    config: &GmresConfig,
) -> Result<GmresStats> {
    let n = a.dim();
    if b.len() != n || x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len().min(x.len()),
        });
    }
    let bnorm = norm(b);
    let target = (config.tol_rel * bnorm).max(config.tol_abs);
    let m = config.restart.max(1);
    let mut stats = GmresStats {
        rhs_norm: bnorm,
        ..Default::default()
    };
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut estimate_converged = false;
    loop {
        a.apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm(&r);
        stats.residual_norm = beta;
        if stats.history.is_empty() {
            stats.history.push(beta);
        }
        // Accept a small roundoff gap between the recurrence and the true residual.
        if beta <= target || beta == 0.0 || (estimate_converged && beta <= 10.0 * target) {
            return Ok(stats);
        }
        if stats.iterations >= config.max_its {
            return Err(Error::GmresNotConverged {
                iterations: stats.iterations,
                residual: beta,
            });
        }
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k = 0;
        let mut resid = beta;
        while k < m && stats.iterations < config.max_its {
            pc.apply(&basis[k], &mut z);
            a.apply(&z, &mut w);
            for j in 0..=k {
                let hj = dot(&w, &basis[j]);
                h[j][k] = hj;
                for (wi, vi) in w.iter_mut().zip(&basis[j]) {
                    *wi -= hj * vi;
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c * h[k][k] + s * h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -s * g[k];
            g[k] *= c;
            resid = g[k + 1].abs();
            stats.iterations += 1;
            stats.history.push(resid);
            k += 1;
            if resid <= target || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        // Solve the triangular system and update x = x + M^{-1} V y.
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            for (ui, vi) in update.iter_mut().zip(&basis[j]) {
                *ui += yj * vi;
            }
        }
        pc.apply(&update, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        stats.residual_norm = resid;
        estimate_converged = resid <= target;
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a == 0.0 {
        (0.0, 1.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::dense::DenseLu;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_converges_in_one() {
        let a = CsrMatrix::identity(10);
        let b: Vec<f64> = (0..10).map(|i| i as f64 - 3.0).collect();
        let mut x = vec![0.0; 10];
        let s = gmres(&a, &b, &mut x, &IdentityPreconditioner, &GmresConfig::default()).unwrap();
        assert_eq!(s.iterations, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn random_system_matches_dense_lu() {
        let n = 50;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = rng.gen_range(-1.0..1.0) / n as f64;
            }
            a[i * n + i] += 2.0;
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = CsrMatrix::from_dense(n, n, &a);
        let mut x = vec![0.0; n];
        let cfg = GmresConfig {
            tol_rel: 1e-12,
            ..Default::default()
        };
        gmres(&m, &b, &mut x, &IdentityPreconditioner, &cfg).unwrap();
        let lu = DenseLu::factor(n, a).unwrap();
        let mut xe = b.clone();
        lu.solve(&mut xe);
        for (u, v) in x.iter().zip(&xe) {
            assert!((u - v).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_history_monotone_and_restarts_work() {
        let n = 60;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + (i % 5) as f64));
            t.push((i, (i + 1) % n, -1.0));
            t.push(((i + 3) % n, i, 0.5));
        }
        let m = CsrMatrix::from_triplets(n, n, &t);
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let cfg = GmresConfig {
            tol_rel: 1e-10,
            restart: 7,
            max_its: 500,
            tol_abs: 0.0,
        };
        let s = gmres(&m, &b, &mut x, &JacobiPreconditioner::new(&m), &cfg).unwrap();
        for w in s.history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        let r = m.mul_vec(&x);
        let err: f64 = r.iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-9 * (n as f64).sqrt());
    }

    #[test]
    fn reports_non_convergence() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, (i + 1) % n, 1.0));
        }
        let m = CsrMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let mut x = vec![0.0; n];
        let cfg = GmresConfig {
            tol_rel: 1e-10,
            restart: 5,
            max_its: 10,
            tol_abs: 0.0,
        };
        assert!(matches!(
            gmres(&m, &b, &mut x, &IdentityPreconditioner, &cfg),
            Err(Error::GmresNotConverged { .. })
        ));
    }
}
