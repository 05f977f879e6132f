//! Implicit-midpoint time stepping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::assemble::Assembler;
use crate::forms::state::State;
use crate::solver::asm::{build_patches, AsmPreconditioner};
use crate::solver::csr::CsrMatrix;
use crate::solver::gmres::Preconditioner;
use crate::solver::newton::{newton_solve, NonlinearProblem, SolverConfig};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub newton_its: usize,
    pub gmres_its: usize,
    pub gmres_failures: usize,
    pub initial_residual: f64,
    pub final_residual: f64,
}

/// Advances states with the implicit midpoint rule.
#[derive(Debug, Clone)]
pub struct TimeStepper {
    pub assembler: Assembler,
    pub config: SolverConfig,
    asm: AsmPreconditioner,
}

struct StepProblem<'a> {
    stepper: &'a TimeStepper,
    old: &'a [f64],
    dt: f64,
}

impl NonlinearProblem for StepProblem<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.stepper.assembler.residual(x, self.old, self.dt)
    }

    fn jacobian(&self, x: &[f64]) -> Result<CsrMatrix> {
        self.stepper.assembler.jacobian(x, self.old, self.dt)
    }

    fn row_scaling(&self) -> Option<Vec<f64>> {
        Some(self.stepper.assembler.row_scaling(self.dt))
    }

    fn preconditioner(&self, jac: &CsrMatrix) -> Result<Box<dyn Preconditioner + '_>> {
        let mut pc = self.stepper.asm.clone();
        pc.factor(jac)?;
        Ok(Box::new(pc))
    }
}

impl TimeStepper {
    pub fn new(assembler: Assembler, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let patches = build_patches(&assembler.spaces, assembler.pattern());
        let asm = AsmPreconditioner::new(assembler.num_dofs(), patches);
        Ok(TimeStepper { assembler, config, asm })
    }

    pub fn preconditioner_template(&self) -> &AsmPreconditioner {
        &self.asm
    }

    /// One step from the monolithic vector `old`; `old` is also the initial guess.
    pub fn step(&self, old: &[f64], dt: f64) -> Result<(Vec<f64>, StepStats)> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be nonzero and finite, got {dt}")));
        }
        let problem = StepProblem {
            stepper: self,
            old,
            dt,
        };
        let (x, s) = newton_solve(&problem, old, &self.config)?;
        let stats = StepStats {
            newton_its: s.newton_its,
            gmres_its: s.gmres_its,
            gmres_failures: s.gmres_failures,
            initial_residual: s.residual_norms[0],
            final_residual: *s.residual_norms.last().unwrap(),
        };
        Ok((x, stats))
    }

    pub fn step_state(&self, old: &State, dt: f64) -> Result<(State, StepStats)> {
        let (x, s) = self.step(&old.to_vector(), dt)?;
        Ok((State::from_vector(&self.assembler.spaces, &x)?, s))
    }
}
