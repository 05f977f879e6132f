//! Linear algebra, preconditioning, Newton iteration and time stepping.

pub mod asm;
pub mod banded;
pub mod csr;
pub mod dense;
pub mod gmres;
pub mod newton;
pub mod rcm;
pub mod timestep;

pub use asm::{build_patches, AsmPreconditioner, ColumnPatch};
pub use csr::CsrMatrix;
pub use gmres::{gmres, GmresConfig, GmresStats, LinearOperator, Preconditioner};
pub use newton::{newton_solve, NewtonStats, NonlinearProblem, SolverConfig};
pub use rcm::rcm_ordering;
pub use timestep::{StepStats, TimeStepper};
