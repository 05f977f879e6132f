//! Newton's method with a backtracking linesearch and Krylov linear solves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::csr::CsrMatrix;
use crate::solver::gmres::{gmres, GmresConfig, IdentityPreconditioner, Preconditioner};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub newton_tol_abs: f64,
    pub newton_tol_rel: f64,
    pub newton_max_its: usize,
    pub max_halvings: usize,
    pub gmres_tol_rel: f64,
    pub gmres_restart: usize,
    pub gmres_max_its: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol_abs: 1e-8,
            newton_tol_rel: 1e-6,
            newton_max_its: 20,
            max_halvings: 8,
            gmres_tol_rel: 1e-6,
            gmres_restart: 50,
            gmres_max_its: 2000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol_abs > 0.0 && self.newton_tol_rel > 0.0 && self.gmres_tol_rel > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if self.newton_max_its == 0 || self.gmres_restart == 0 || self.gmres_max_its == 0 {
            return Err(Error::InvalidArgument("iteration limits must be positive".into()));
        }
        Ok(())
    }

    pub fn gmres_config(&self) -> GmresConfig {
        GmresConfig {
            tol_rel: self.gmres_tol_rel,
            tol_abs: 0.0,
            restart: self.gmres_restart,
            max_its: self.gmres_max_its,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NewtonStats {
    pub newton_its: usize,
    pub gmres_its: usize,
    /// RMS scaled residual before the first and after every Newton iteration.
    pub residual_norms: Vec<f64>,
    /// Linear solves that stopped at the iteration limit.
    pub gmres_failures: usize,
}

/// A square nonlinear system `F(x) = 0`.
pub trait NonlinearProblem {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, x: &[f64]) -> Result<CsrMatrix>;

    /// Row scaling applied to residual and Jacobian before norms and solves.
    fn row_scaling(&self) -> Option<Vec<f64>> {
        None
    }

    /// Preconditioner for the (scaled) Jacobian.
    fn preconditioner(&self, _jac: &CsrMatrix) -> Result<Box<dyn Preconditioner + '_>> {
        Ok(Box::new(IdentityPreconditioner))
    }
}

/// Root-mean-square norm, so that tolerances do not grow with the problem size.
fn norm(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn scale(v: &mut [f64], s: Option<&[f64]>) {
    if let Some(s) = s {
        for (a, b) in v.iter_mut().zip(s) {
            *a *= b;
        }
    }
}

/// Solve `F(x) = 0` from `x0`.
///
/// Converged when the scaled residual norm is at most
/// `max(newton_tol_abs, newton_tol_rel * ||F(x0)||)`. Each step is shortened by
/// halving until the residual norm decreases.
pub fn newton_solve<P: NonlinearProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, NewtonStats)> {
    config.validate()?;
    let scaling = problem.row_scaling();
    let sc = scaling.as_deref();
    let mut x = x0.to_vec();
    let mut r = problem.residual(&x)?;
    scale(&mut r, sc);
    let mut rnorm = norm(&r);
    if !rnorm.is_finite() {
        return Err(Error::NewtonFailed {
            iterations: 0,
            residual: rnorm,
            reason: "non-finite initial residual",
        });
    }
    let target = config.newton_tol_abs.max(config.newton_tol_rel * rnorm);
    let mut stats = NewtonStats {
        residual_norms: vec![rnorm],
        ..Default::default()
    };
    if rnorm <= config.newton_tol_abs {
        return Ok((x, stats));
    }
    let gcfg = config.gmres_config();
    while stats.newton_its < config.newton_max_its {
        let mut jac = problem.jacobian(&x)?;
        if let Some(s) = sc {
            let rp = jac.row_ptr().to_vec();
            let vals = jac.values_mut();
            for i in 0..s.len() {
                for v in &mut vals[rp[i]..rp[i + 1]] {
                    *v *= s[i];
                }
            }
        }
        let pc = problem.preconditioner(&jac)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let mut dx = vec![0.0; x.len()];
        match gmres(&jac, &rhs, &mut dx, pc.as_ref(), &gcfg) {
            Ok(s) => stats.gmres_its += s.iterations,
            Err(Error::GmresNotConverged { iterations, .. }) => {
                stats.gmres_its += iterations;
                stats.gmres_failures += 1;
            }
            Err(e) => return Err(e),
        }
        stats.newton_its += 1;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + lambda * b).collect();
            if let Ok(mut rt) = problem.residual(&xt) {
                scale(&mut rt, sc);
                let nt = norm(&rt);
                if nt.is_finite() && (nt < rnorm || nt <= target) {
                    accepted = Some((xt, rt, nt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xt, rt, nt)) => {
                x = xt;
                r = rt;
                rnorm = nt;
            }
            None => {
                return Err(Error::NewtonFailed {
                    iterations: stats.newton_its,
                    residual: rnorm,
                    reason: "linesearch could not reduce the residual",
                })
            }
        }
        stats.residual_norms.push(rnorm);
        if rnorm <= target {
            return Ok((x, stats));
        }
    }
    Err(Error::NewtonFailed {
        iterations: stats.newton_its,
        residual: rnorm,
        reason: "maximum iterations reached",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Square;

    impl NonlinearProblem for Square {
        fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![x[0] * x[0] - 4.0])
        }
        fn jacobian(&self, x: &[f64]) -> Result<CsrMatrix> {
            Ok(CsrMatrix::from_dense(1, 1, &[2.0 * x[0]]))
        }
    }

    #[test]
    fn square_root_of_four() {
        let cfg = SolverConfig {
            newton_tol_abs: 1e-14,
            newton_tol_rel: 1e-300,
            ..Default::default()
        };
        let (x, s) = newton_solve(&Square, &[3.0], &cfg).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14);
        assert!(s.newton_its <= 6);
        // Quadratic tail: error ratio e_{k+1} / e_k^2 bounded.
        let r = &s.residual_norms;
        let n = r.len();
        assert!(r[n - 2] < 1e-4 || r[n - 1] <= 10.0 * r[n - 2] * r[n - 2]);
    }

    #[test]
    fn already_converged_guess() {
        let (_, s) = newton_solve(&Square, &[2.0], &SolverConfig::default()).unwrap();
        assert_eq!(s.newton_its, 0);
    }

    #[test]
    fn failure_reported() {
        struct NoRoot;
        impl NonlinearProblem for NoRoot {
            fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
                Ok(vec![x[0] * x[0] + 1.0])
            }
            fn jacobian(&self, x: &[f64]) -> Result<CsrMatrix> {
                Ok(CsrMatrix::from_dense(1, 1, &[2.0 * x[0]]))
            }
        }
        assert!(newton_solve(&NoRoot, &[1.0], &SolverConfig::default()).is_err());
    }
}
