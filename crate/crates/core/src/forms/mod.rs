//! Discrete equations: pointwise integrands and their assembly.

pub mod assemble;
pub mod constants;
pub mod kernels;
pub mod scalar;
pub mod state;

pub use assemble::Assembler;
pub use constants::{exner, Damping, ModelParams, PhysicalConstants};
pub use state::{Spaces, State};
