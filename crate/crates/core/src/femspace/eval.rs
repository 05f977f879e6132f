//! Pointwise evaluation of discrete fields.

use crate::femspace::basis::{self, SpaceTag};
use crate::femspace::dofmap::DofMap;
use crate::femspace::field::Field;
use crate::mesh::{CellGeometry, ExtrudedMesh};

/// Value and physical gradient of a scalar field at a reference point of `cell`.
pub fn scalar_at(field: &Field, dofmap: &DofMap, geom: &CellGeometry, cell: usize, xi: [f64; 2]) -> (f64, [f64; 2]) {
    let dofs = dofmap.cell_dofs(cell);
    let mut v = 0.0;
    let mut g = [0.0; 2];
    for (i, &d) in dofs.iter().enumerate() {
        let c = field.coefficients[d];
        let (b, bg) = match field.tag {
            SpaceTag::ThetaSpace => basis::theta(i, xi),
            SpaceTag::DensityDgq1 | SpaceTag::YVelocityDgq1 => basis::dq1(i, xi),
            SpaceTag::VelocityRt1 => panic!("velocity field evaluated as a scalar"),
        };
        v += c * b;
        g[0] += c * bg[0];
        g[1] += c * bg[1];
    }
    (v, basis::scalar_gradient(geom, g))
}

/// Value and physical gradient `du_i/dx_j` of a velocity field.
pub fn velocity_at(
    field: &Field,
    dofmap: &DofMap,
    geom: &CellGeometry,
    cell: usize,
    xi: [f64; 2],
) -> ([f64; 2], [[f64; 2]; 2]) {
    let dofs = dofmap.cell_dofs(cell);
    let mut v = [0.0; 2];
    let mut dv = [[0.0; 2]; 2];
    for (i, &d) in dofs.iter().enumerate() {
        let c = field.coefficients[d] * dofmap.sign(cell, i);
        let (b, bg) = basis::rt1(i, xi);
        for a in 0..2 {
            v[a] += c * b[a];
            for k in 0..2 {
                dv[a][k] += c * bg[a][k];
            }
        }
    }
    (basis::piola_map(geom, v), basis::piola_gradient(geom, v, dv))
}

/// Cellwise divergence of a velocity field (reference divergence over det J).
pub fn divergence_at(field: &Field, dofmap: &DofMap, geom: &CellGeometry, cell: usize, xi: [f64; 2]) -> f64 {
    let dofs = dofmap.cell_dofs(cell);
    let mut div = 0.0;
    for (i, &d) in dofs.iter().enumerate() {
        let (_, bg) = basis::rt1(i, xi);
        div += field.coefficients[d] * dofmap.sign(cell, i) * (bg[0][0] + bg[1][1]);
    }
    div / geom.det_jacobian
}

/// Scalar value at a physical point (clamped to the nearest cell if outside).
pub fn scalar_at_point(field: &Field, dofmap: &DofMap, mesh: &ExtrudedMesh, x: f64, z: f64) -> f64 {
    let (cell, xi, _) = mesh.locate(x, z);
    let geom = mesh.corners(cell).geometry(xi);
    scalar_at(field, dofmap, &geom, cell, xi).0
}

/// Velocity at a physical point (clamped to the nearest cell if outside).
pub fn velocity_at_point(field: &Field, dofmap: &DofMap, mesh: &ExtrudedMesh, x: f64, z: f64) -> [f64; 2] {
    let (cell, xi, _) = mesh.locate(x, z);
    let geom = mesh.corners(cell).geometry(xi);
    velocity_at(field, dofmap, &geom, cell, xi).0
}
