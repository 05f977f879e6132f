//! L² projection of expressions into the discrete spaces.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::femspace::basis::{self, SpaceTag};
use crate::femspace::dofmap::DofMap;
use crate::femspace::field::Field;
use crate::femspace::quadrature::square_rule;
use crate::mesh::ExtrudedMesh;
use crate::solver::csr::CsrMatrix;
use crate::solver::dense::DenseLu;
use crate::solver::gmres::{gmres, GmresConfig, JacobiPreconditioner};

/// Quadrature degree used for all volume and facet integrals.
pub const DEFAULT_QUAD_DEGREE: usize = 6;

fn scalar_basis(tag: SpaceTag) -> fn(usize, [f64; 2]) -> (f64, [f64; 2]) {
    match tag {
        SpaceTag::ThetaSpace => basis::theta,
        SpaceTag::DensityDgq1 | SpaceTag::YVelocityDgq1 => basis::dq1,
        SpaceTag::VelocityRt1 => panic!("velocity is not a scalar space"),
    }
}

/// Project `f(cell, xi, x)` into a scalar space. The expression receives the
/// cell, the reference point and the physical point of each quadrature point.
pub fn project_scalar_with<F>(f: F, dofmap: &DofMap, mesh: &ExtrudedMesh, quad_degree: usize) -> Result<Field>
where
    F: Fn(usize, [f64; 2], [f64; 2]) -> f64 + Sync,
{
    let tag = dofmap.tag;
    let phi = scalar_basis(tag);
    let nd = tag.num_dofs_per_cell();
    let rule = square_rule(quad_degree);
    let nl = mesh.nlayers();
    // Per-cell local mass matrix and load vector.
    let local = |cell: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let corners = mesh.corners(cell);
        let mut m = vec![0.0; nd * nd];
        let mut b = vec![0.0; nd];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let g = corners.geometry(*p);
            if !(g.det_jacobian > 0.0) {
                return Err(Error::DegenerateCell {
                    cell,
                    det: g.det_jacobian,
                });
            }
            let dx = w * g.det_jacobian;
            let val = f(cell, *p, g.point);
            if !val.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite projection source at ({}, {})",
                    g.point[0], g.point[1]
                )));
            }
            let vals: Vec<f64> = (0..nd).map(|i| phi(i, *p).0).collect();
            for i in 0..nd {
                b[i] += dx * vals[i] * val;
                for j in 0..nd {
                    m[i * nd + j] += dx * vals[i] * vals[j];
                }
            }
        }
        Ok((m, b))
    };
    let mut coeffs = vec![0.0; dofmap.num_global()];
    match tag {
        SpaceTag::DensityDgq1 | SpaceTag::YVelocityDgq1 => {
            let blocks: Vec<Result<Vec<f64>>> = (0..mesh.num_cells())
                .into_par_iter()
                .map(|cell| {
                    let (m, mut b) = local(cell)?;
                    DenseLu::factor(nd, m)?.solve(&mut b);
                    Ok(b)
                })
                .collect();
            for (cell, blk) in blocks.into_iter().enumerate() {
                let blk = blk?;
                for (i, &g) in dofmap.cell_dofs(cell).iter().enumerate() {
                    coeffs[g] = blk[i];
                }
            }
        }
        SpaceTag::ThetaSpace => {
            let cols: Vec<Result<Vec<f64>>> = (0..mesh.ncols())
                .into_par_iter()
                .map(|col| {
                    let range = dofmap.column_range(col);
                    let n = range.len();
                    let mut m = vec![0.0; n * n];
                    let mut b = vec![0.0; n];
                    for k in 0..nl {
                        let cell = mesh.cell_index(col, k);
                        let (lm, lb) = local(cell)?;
                        let dofs = dofmap.cell_dofs(cell);
                        for i in 0..nd {
                            let gi = dofs[i] - range.start;
                            b[gi] += lb[i];
                            for j in 0..nd {
                                m[gi * n + dofs[j] - range.start] += lm[i * nd + j];
                            }
                        }
                    }
                    DenseLu::factor(n, m)?.solve(&mut b);
                    Ok(b)
                })
                .collect();
            for (col, c) in cols.into_iter().enumerate() {
                let c = c?;
                let r = dofmap.column_range(col);
                coeffs[r].copy_from_slice(&c);
            }
        }
        SpaceTag::VelocityRt1 => unreachable!(),
    }
    Field::from_coefficients(dofmap, coeffs)
}

/// Project a function of physical position into a scalar space.
pub fn project_scalar<F>(f: F, dofmap: &DofMap, mesh: &ExtrudedMesh, quad_degree: usize) -> Result<Field>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    project_scalar_with(|_, _, x| f(x[0], x[1]), dofmap, mesh, quad_degree)
}

/// RT1 mass matrix (Piola-mapped basis).
pub fn velocity_mass_matrix(dofmap: &DofMap, mesh: &ExtrudedMesh, quad_degree: usize) -> CsrMatrix {
    let rule = square_rule(quad_degree);
    let n = dofmap.num_global();
    let mut rows = vec![Vec::new(); n];
    for cell in 0..mesh.num_cells() {
        let d = dofmap.cell_dofs(cell);
        for &i in d {
            rows[i].extend_from_slice(d);
        }
    }
    let mut m = CsrMatrix::from_pattern(n, n, rows);
    for cell in 0..mesh.num_cells() {
        let corners = mesh.corners(cell);
        let d = dofmap.cell_dofs(cell);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let g = corners.geometry(*p);
            let vals: Vec<[f64; 2]> = (0..12)
                .map(|i| {
                    let v = basis::piola_map(&g, basis::rt1(i, *p).0);
                    let s = dofmap.sign(cell, i);
                    [s * v[0], s * v[1]]
                })
                .collect();
            let dx = w * g.det_jacobian;
            for i in 0..12 {
                for j in 0..12 {
                    m.add(d[i], d[j], dx * (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]));
                }
            }
        }
    }
    m
}

/// Project a vector function into the velocity space. With `strong_bc` the
/// normal component on the top and bottom boundaries is set to zero.
pub fn project_velocity<F>(
    f: F,
    dofmap: &DofMap,
    mesh: &ExtrudedMesh,
    quad_degree: usize,
    strong_bc: bool,
) -> Result<Field>
where
    F: Fn(f64, f64) -> [f64; 2] + Sync,
{
    let rule = square_rule(quad_degree);
    let n = dofmap.num_global();
    let mut m = velocity_mass_matrix(dofmap, mesh, quad_degree);
    let mut b = vec![0.0; n];
    for cell in 0..mesh.num_cells() {
        let corners = mesh.corners(cell);
        let d = dofmap.cell_dofs(cell);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let g = corners.geometry(*p);
            let val = f(g.point[0], g.point[1]);
            let dx = w * g.det_jacobian;
            for i in 0..12 {
                let v = basis::piola_map(&g, basis::rt1(i, *p).0);
                b[d[i]] += dx * dofmap.sign(cell, i) * (v[0] * val[0] + v[1] * val[1]);
            }
        }
    }
    if strong_bc {
        let fixed: Vec<usize> = dofmap.constrained().collect();
        m.set_identity_rows_cols(&fixed);
        for d in fixed {
            b[d] = 0.0;
        }
    }
    let mut x = vec![0.0; n];
    let pc = JacobiPreconditioner::new(&m);
    let cfg = GmresConfig {
        tol_rel: 1e-14,
        tol_abs: 1e-300,
        restart: 100,
        max_its: 20_000,
    };
    match gmres(&m, &b, &mut x, &pc, &cfg) {
        Ok(_) => {}
        Err(Error::GmresNotConverged { residual, .. }) if residual <= 1e-11 * norm(&b) => {}
        Err(e) => return Err(e),
    }
    Field::from_coefficients(dofmap, x)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Project an expression into any of the model spaces. Velocity expressions
/// are given componentwise through `vector`; scalar spaces use `scalar`.
pub fn project(
    scalar: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
    vector: Option<&(dyn Fn(f64, f64) -> [f64; 2] + Sync)>,
    tag: SpaceTag,
    mesh: &ExtrudedMesh,
    quad_degree: usize,
) -> Result<Field> {
    let dofmap = DofMap::new(tag, mesh);
    match (tag, scalar, vector) {
        (SpaceTag::VelocityRt1, _, Some(v)) => project_velocity(v, &dofmap, mesh, quad_degree, false),
        (SpaceTag::VelocityRt1, _, None) => Err(Error::InvalidArgument(
            "velocity projection needs a vector expression".into(),
        )),
        (_, Some(s), _) => project_scalar(s, &dofmap, mesh, quad_degree),
        (_, None, _) => Err(Error::InvalidArgument(
            "scalar projection needs a scalar expression".into(),
        )),
    }
}

/// L² norm of `field - exact` computed with the given quadrature degree.
pub fn l2_error_scalar<F>(field: &Field, dofmap: &DofMap, mesh: &ExtrudedMesh, exact: F, quad_degree: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let rule = square_rule(quad_degree);
    let mut s = 0.0;
    for cell in 0..mesh.num_cells() {
        let corners = mesh.corners(cell);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let g = corners.geometry(*p);
            let v = crate::femspace::eval::scalar_at(field, dofmap, &g, cell, *p).0;
            let e = v - exact(g.point[0], g.point[1]);
            s += w * g.det_jacobian * e * e;
        }
    }
    s.sqrt()
}
