//! Compatible finite element solver for the compressible Euler equations in
//! vertical-slice geometry.
//!
//! Velocity lives in the next-to-lowest-order Raviart–Thomas space, density in
//! discontinuous bilinears and potential temperature in a space that is
//! quadratic and continuous in the vertical, linear and discontinuous in the
//! horizontal. Time stepping is implicit midpoint; each step is a Newton solve
//! whose linear systems use GMRES preconditioned by additive Schwarz over
//! pairs of neighbouring columns.

pub mod balance;
pub mod error;
pub mod femspace;
pub mod forms;
pub mod io;
pub mod mesh;
pub mod solver;
pub mod testcases;

pub use error::{Error, Result};
pub use femspace::{DofMap, Field, SpaceTag};
pub use mesh::{CellGeometry, ExtrudedMesh, FacetKind, FacetRef};
