//! Reference bases of the velocity, density and temperature spaces on `[-1, 1]^2`.
//!
//! Gradients are returned with respect to reference coordinates; for vector
//! bases `grad[c][k]` is the derivative of component `c` along reference
//! direction `k`.

use serde::{Deserialize, Serialize};

use crate::mesh::CellGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceTag {
    VelocityRt1,
    DensityDgq1,
    ThetaSpace,
    YVelocityDgq1,
}

impl SpaceTag {
    pub fn num_dofs_per_cell(self) -> usize {
        match self {
            SpaceTag::VelocityRt1 => 12,
            SpaceTag::DensityDgq1 | SpaceTag::YVelocityDgq1 => 4,
            SpaceTag::ThetaSpace => 6,
        }
    }

    pub fn value_size(self) -> usize {
        match self {
            SpaceTag::VelocityRt1 => 2,
            _ => 1,
        }
    }
}

// Quadratic Lagrange polynomials at -1, +1 and 0.
#[inline]
fn quad(i: usize, s: f64) -> (f64, f64) {
    match i {
        0 => (0.5 * s * (s - 1.0), s - 0.5),
        1 => (0.5 * s * (s + 1.0), s + 0.5),
        _ => (1.0 - s * s, -2.0 * s),
    }
}

// Monomials 1, s.
#[inline]
fn mono(i: usize, s: f64) -> (f64, f64) {
    if i == 0 {
        (1.0, 0.0)
    } else {
        (s, 1.0)
    }
}

// Linear Lagrange polynomials at -1, +1.
#[inline]
fn lin(i: usize, s: f64) -> (f64, f64) {
    if i == 0 {
        (0.5 * (1.0 - s), -0.5)
    } else {
        (0.5 * (1.0 + s), 0.5)
    }
}

/// RT1 basis function `i` at `xi`: (value, reference gradient).
///
/// Local ordering: 0–1 left facet, 2–3 right facet, 4–5 bottom facet,
/// 6–7 top facet, 8–9 horizontal interior, 10–11 vertical interior. Within each
/// pair the second function carries the linear tangential moment.
#[inline]
pub fn rt1(i: usize, xi: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (s, t) = (xi[0], xi[1]);
    let b = i & 1;
    let (horizontal, q) = match i >> 1 {
        0 => (true, 0),
        1 => (true, 1),
        2 => (false, 0),
        3 => (false, 1),
        4 => (true, 2),
        _ => (false, 2),
    };
    if horizontal {
        let (a, da) = quad(q, s);
        let (m, dm) = mono(b, t);
        ([a * m, 0.0], [[da * m, a * dm], [0.0, 0.0]])
    } else {
        let (m, dm) = mono(b, s);
        let (a, da) = quad(q, t);
        ([0.0, m * a], [[0.0, 0.0], [dm * a, m * da]])
    }
}

/// Bilinear DG basis function `i = h + 2 v` at `xi`.
#[inline]
pub fn dq1(i: usize, xi: [f64; 2]) -> (f64, [f64; 2]) {
    let (a, da) = lin(i & 1, xi[0]);
    let (b, db) = lin(i >> 1, xi[1]);
    (a * b, [da * b, a * db])
}

/// Temperature-space basis `i = h + 2 v`: linear in `xi`, quadratic in `zeta`
/// with vertical nodes at -1 (v = 0), 0 (v = 1), +1 (v = 2).
#[inline]
pub fn theta(i: usize, xi: [f64; 2]) -> (f64, [f64; 2]) {
    let (a, da) = lin(i & 1, xi[0]);
    let q = match i >> 1 {
        0 => 0,
        1 => 2,
        _ => 1,
    };
    let (b, db) = quad(q, xi[1]);
    (a * b, [da * b, a * db])
}

/// Reference nodes of the temperature space in local order.
pub fn theta_nodes() -> [[f64; 2]; 6] {
    [
        [-1.0, -1.0],
        [1.0, -1.0],
        [-1.0, 0.0],
        [1.0, 0.0],
        [-1.0, 1.0],
        [1.0, 1.0],
    ]
}

/// Reference nodes of the bilinear DG space in local order.
pub fn dq1_nodes() -> [[f64; 2]; 4] {
    [[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]]
}

/// Basis values and reference gradients of one space at a list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulation {
    pub tag: SpaceTag,
    pub npoints: usize,
    pub ndofs: usize,
    pub ncomp: usize,
    /// Indexed `[(point * ndofs + dof) * ncomp + comp]`.
    pub values: Vec<f64>,
    /// Indexed `[((point * ndofs + dof) * ncomp + comp) * 2 + k]`.
    pub gradients: Vec<f64>,
}

impl Tabulation {
    pub fn value(&self, point: usize, dof: usize, comp: usize) -> f64 {
        self.values[(point * self.ndofs + dof) * self.ncomp + comp]
    }
    pub fn gradient(&self, point: usize, dof: usize, comp: usize) -> [f64; 2] {
        let o = ((point * self.ndofs + dof) * self.ncomp + comp) * 2;
        [self.gradients[o], self.gradients[o + 1]]
    }
}

/// Reference basis of one of the model spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceBasis {
    pub tag: SpaceTag,
}

impl ReferenceBasis {
    pub fn new(tag: SpaceTag) -> Self {
        ReferenceBasis { tag }
    }

    pub fn num_dofs(&self) -> usize {
        self.tag.num_dofs_per_cell()
    }

    pub fn tabulate(&self, points: &[[f64; 2]]) -> Tabulation {
        let ndofs = self.num_dofs();
        let ncomp = self.tag.value_size();
        let mut values = Vec::with_capacity(points.len() * ndofs * ncomp);
        let mut gradients = Vec::with_capacity(points.len() * ndofs * ncomp * 2);
        for &p in points {
            for i in 0..ndofs {
                match self.tag {
                    SpaceTag::VelocityRt1 => {
                        let (v, g) = rt1(i, p);
                        values.extend_from_slice(&v);
                        gradients.extend_from_slice(&[g[0][0], g[0][1], g[1][0], g[1][1]]);
                    }
                    SpaceTag::DensityDgq1 | SpaceTag::YVelocityDgq1 => {
                        let (v, g) = dq1(i, p);
                        values.push(v);
                        gradients.extend_from_slice(&g);
                    }
                    SpaceTag::ThetaSpace => {
                        let (v, g) = theta(i, p);
                        values.push(v);
                        gradients.extend_from_slice(&g);
                    }
                }
            }
        }
        Tabulation {
            tag: self.tag,
            npoints: points.len(),
            ndofs,
            ncomp,
            values,
            gradients,
        }
    }
}

/// Contravariant Piola map `u = J u_hat / det J`.
#[inline]
pub fn piola_map(geom: &CellGeometry, v: [f64; 2]) -> [f64; 2] {
    let j = &geom.jacobian;
    let d = geom.det_jacobian;
    [
        (j[0][0] * v[0] + j[0][1] * v[1]) / d,
        (j[1][0] * v[0] + j[1][1] * v[1]) / d,
    ]
}

/// Physical gradient `du_i/dx_j` of a Piola-mapped vector field given its
/// reference value and reference gradient.
#[inline]
pub fn piola_gradient(geom: &CellGeometry, v: [f64; 2], dv: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let j = &geom.jacobian;
    let d = geom.det_jacobian;
    let mut du_dxi = [[0.0; 2]; 2];
    for i in 0..2 {
        let ju = j[i][0] * v[0] + j[i][1] * v[1];
        for k in 0..2 {
            let dj = &geom.djacobian[k];
            let num = dj[i][0] * v[0] + dj[i][1] * v[1] + j[i][0] * dv[0][k] + j[i][1] * dv[1][k];
            du_dxi[i][k] = num / d - ju * geom.ddet[k] / (d * d);
        }
    }
    let inv = &geom.inverse_jacobian;
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for jx in 0..2 {
            out[i][jx] = du_dxi[i][0] * inv[0][jx] + du_dxi[i][1] * inv[1][jx];
        }
    }
    out
}

/// Physical gradient of a scalar given its reference gradient.
#[inline]
pub fn scalar_gradient(geom: &CellGeometry, g: [f64; 2]) -> [f64; 2] {
    let inv = &geom.inverse_jacobian;
    [
        g[0] * inv[0][0] + g[1] * inv[1][0],
        g[0] * inv[0][1] + g[1] * inv[1][1],
    ]
}
