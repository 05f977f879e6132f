use thiserror::Error;

/// Errors raised anywhere in the discretisation, solver or setup code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("terrain height {height} at x = {x} must lie in [0, {top})")]
    TerrainOutOfRange { x: f64, height: f64, top: f64 },

    #[error("degenerate cell {cell}: det J = {det:e}")]
    DegenerateCell { cell: usize, det: f64 },

    #[error("facet {0} is a boundary facet; an interior facet is required")]
    BoundaryFacet(usize),

    #[error("nonpositive {field} = {value:e} in cell {cell}")]
    NonPositive {
        field: &'static str,
        value: f64,
        cell: usize,
    },

    #[error("singular matrix in {context} (pivot {pivot})")]
    Singular { context: String, pivot: usize },

    #[error("patch {patch}: singular local factorization (pivot {pivot})")]
    SingularPatch { patch: usize, pivot: usize },

    #[error("GMRES did not converge in {iterations} iterations (residual {residual:e})")]
    GmresNotConverged { iterations: usize, residual: f64 },

    #[error("Newton failed after {iterations} iterations: {reason} (residual {residual:e})")]
    NewtonFailed {
        iterations: usize,
        residual: f64,
        reason: &'static str,
    },

    #[error("hydrostatic balance failed in column {column}: {reason}")]
    Balance { column: usize, reason: String },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
