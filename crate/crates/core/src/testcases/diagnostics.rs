use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::femspace::eval::{scalar_at, velocity_at};
use crate::femspace::quadrature::square_rule;
use crate::femspace::Field;
use crate::forms::state::{Spaces, State};
use crate::mesh::ExtrudedMesh;

use super::init::nodal_values;

/// Perturbations below this (in K) count as negative for the front location.
pub const FRONT_THRESHOLD: f64 = -1e-8;

/// Summary quantities of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub theta_perturbation_min: f64,
    pub theta_perturbation_max: f64,
    pub front_location: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub total_mass: f64,
}

/// Extrema of `theta - theta_b` over the nodes of the temperature space.
pub fn perturbation_extrema(theta: &Field, theta_b: &Field) -> (f64, f64) {
    theta
        .coefficients
        .iter()
        .zip(&theta_b.coefficients)
        .map(|(a, b)| a - b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)))
}

/// Largest right-edge x coordinate over cells with a negative temperature
/// perturbation at some node; the left end of the domain if there is none.
pub fn front_location(theta: &Field, theta_b: &Field, spaces: &Spaces) -> f64 {
    let mesh = &spaces.mesh;
    let mut front = mesh.x_offset();
    for cell in 0..mesh.num_cells() {
        let a = nodal_values(theta, spaces, cell);
        let b = nodal_values(theta_b, spaces, cell);
        let negative = a.iter().zip(&b).any(|(x, y)| x - y < FRONT_THRESHOLD);
        if negative {
            let (col, _) = mesh.cell_position(cell);
            front = front.max(mesh.line_x(col + 1));
        }
    }
    front
}

/// Reference sampling points for velocity extrema: a 3 x 3 grid per cell.
const SAMPLE: [f64; 3] = [-1.0, 0.0, 1.0];

/// Extrema of the vertical velocity over a 3 x 3 grid of points in each cell.
pub fn w_extrema(u: &Field, spaces: &Spaces) -> (f64, f64) {
    let mesh = &spaces.mesh;
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let corners = mesh.corners(cell);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &z in &SAMPLE {
                for &x in &SAMPLE {
                    let xi = [x, z];
                    let g = corners.geometry(xi);
                    let w = velocity_at(u, &spaces.velocity, &g, cell, xi).0[1];
                    lo = lo.min(w);
                    hi = hi.max(w);
                }
            }
            (lo, hi)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        )
}

/// `∫ rho dx` per unit length in y.
pub fn total_mass(rho: &Field, spaces: &Spaces, quad_degree: usize) -> f64 {
    let mesh: &ExtrudedMesh = &spaces.mesh;
    let rule = square_rule(quad_degree);
    let per_cell: Vec<f64> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let corners = mesh.corners(cell);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| {
                    let g = corners.geometry(*p);
                    w * g.det_jacobian * scalar_at(rho, &spaces.density, &g, cell, *p).0
                })
                .sum()
        })
        .collect();
    // Summed serially in cell order so the result does not depend on threading.
    per_cell.iter().sum()
}

pub fn compute(state: &State, theta_b: &Field, spaces: &Spaces, quad_degree: usize) -> Diagnostics {
    let (tmin, tmax) = perturbation_extrema(&state.theta, theta_b);
    let (w_min, w_max) = w_extrema(&state.u, spaces);
    Diagnostics {
        theta_perturbation_min: tmin,
        theta_perturbation_max: tmax,
        front_location: front_location(&state.theta, theta_b, spaces),
        w_min,
        w_max,
        total_mass: total_mass(&state.rho, spaces, quad_degree),
    }
}
