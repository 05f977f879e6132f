//! Finite element spaces: quadrature, reference bases, dof maps, fields and projection.

pub mod basis;
pub mod dofmap;
pub mod eval;
pub mod field;
pub mod project;
pub mod quadrature;

pub use basis::{piola_map, ReferenceBasis, SpaceTag, Tabulation};
pub use dofmap::DofMap;
pub use field::Field;
pub use project::{project, project_scalar, project_scalar_with, project_velocity, DEFAULT_QUAD_DEGREE};
pub use quadrature::{interval_rule, square_rule, QuadratureRule};

/// Gauss rule on a cell (`square`) or facet (`interval`) exact to `degree` per direction.
pub fn gauss_rule_interval(degree: usize) -> QuadratureRule<f64> {
    interval_rule(degree)
}

pub fn gauss_rule_square(degree: usize) -> QuadratureRule<[f64; 2]> {
    square_rule(degree)
}
