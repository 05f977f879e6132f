//! Discrete hydrostatic balance.
//!
//! Given a potential temperature `theta_b`, find a density `rho_b` whose Exner
//! pressure `Pi(rho_b, theta_b)` balances gravity exactly in the discrete
//! momentum equation. Following the mixed formulation, an auxiliary vertical
//! velocity `v` is introduced and the square system
//!
//! ```text
//!   ∫ w·v - ∫ div(w θ_b) c_p Π + ∫ g w·k + ∫_{∂Ω₀} c_p w·n θ_b Π₀ = 0
//!   ∫ div(v θ_b) c_p φ = 0
//! ```
//!
//! is solved column by column, `w` ranging over the vertical velocity dofs that
//! are free on the boundary `∂Ω₀` where `Π = Π₀` is imposed weakly. A linear
//! solve with `Π` as an independent bilinear field supplies the initial guess
//! for Newton's method on `rho`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::femspace::basis;
use crate::femspace::field::Field;
use crate::femspace::quadrature::{interval_rule, square_rule};
use crate::forms::constants::{exner, rho_from_exner, PhysicalConstants};
use crate::forms::state::Spaces;
use crate::solver::banded::BandedMatrix;

/// Boundary on which the Exner pressure is prescribed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundarySide {
    Bottom,
    Top,
}

/// Local RT1 dofs carrying the vertical component.
const Z_DOFS: [usize; 6] = [4, 5, 6, 7, 10, 11];

#[derive(Debug, Clone)]
struct PointData {
    dx: f64,
    /// Physical vertical basis vectors of the six vertical dofs.
    w: [[f64; 2]; 6],
    /// Physical divergence of the six vertical dofs.
    div: [f64; 6],
    phi: [f64; 4],
    theta: f64,
    dtheta: [f64; 2],
}

/// Quadrature data of one column, independent of the unknowns.
#[derive(Debug, Clone)]
struct ColumnCache {
    column: usize,
    points: Vec<Vec<PointData>>,
    /// Boundary-facet weights `θ_b ŵ·n̂` for the two boundary dofs, per quadrature point.
    boundary: Vec<(f64, [f64; 2])>,
    /// Column unknown index for each cell-local vertical dof (None when excluded).
    vmap: Vec<[Option<usize>; 6]>,
    /// Column unknown index of the four density/Exner dofs of each cell.
    smap: Vec<[usize; 4]>,
    n: usize,
    gravity: Vec<f64>,
}

/// Hydrostatic balance problem on all columns of a mesh.
#[derive(Debug, Clone)]
pub struct BalanceProblem<'a> {
    pub spaces: &'a Spaces,
    pub theta_b: &'a Field,
    pub pi_boundary_value: f64,
    pub boundary_side: BoundarySide,
    pub constants: PhysicalConstants,
    pub quad_degree: usize,
}

/// Output of [`BalanceProblem::solve_rho`].
#[derive(Debug, Clone)]
pub struct BalanceResult {
    pub rho: Field,
    /// Exner pressure from the linear initial-guess solve.
    pub pi_linear: Field,
    /// Auxiliary vertical velocity at convergence.
    pub v: Field,
    pub max_newton_its: usize,
    /// Largest column residual norm relative to the column gravity norm.
    pub max_relative_residual: f64,
}

const NEWTON_REL_TOL: f64 = 1e-12;
const NEWTON_MAX_ITS: usize = 30;

impl<'a> BalanceProblem<'a> {
    pub fn new(
        spaces: &'a Spaces,
        theta_b: &'a Field,
        pi_boundary_value: f64,
        boundary_side: BoundarySide,
        constants: PhysicalConstants,
    ) -> Self {
        BalanceProblem {
            spaces,
            theta_b,
            pi_boundary_value,
            boundary_side,
            constants,
            quad_degree: crate::femspace::DEFAULT_QUAD_DEGREE,
        }
    }

    fn cache(&self, column: usize) -> Result<ColumnCache> {
        let mesh = &self.spaces.mesh;
        let nl = mesh.nlayers();
        let rule = square_rule(self.quad_degree);
        let frule = interval_rule(self.quad_degree);
        let td = &self.spaces.theta;
        // Unknown layout interleaved by layer: facet level k (2), bubble (2), density (4).
        let mut level_idx = vec![None; nl + 1];
        let mut bubble_idx = vec![0; nl];
        let mut s_idx = vec![0; nl];
        let mut n = 0;
        for k in 0..=nl {
            let excluded = match self.boundary_side {
                BoundarySide::Bottom => k == nl,
                BoundarySide::Top => k == 0,
            };
            if !excluded {
                level_idx[k] = Some(n);
                n += 2;
            }
            if k < nl {
                bubble_idx[k] = n;
                n += 2;
                s_idx[k] = n;
                n += 4;
            }
        }
        let mut points = Vec::with_capacity(nl);
        let mut vmap = Vec::with_capacity(nl);
        let mut smap = Vec::with_capacity(nl);
        let mut gravity = vec![0.0; n];
        for k in 0..nl {
            let cell = mesh.cell_index(column, k);
            let corners = mesh.corners(cell);
            let lo = level_idx[k];
            let hi = level_idx[k + 1];
            let b = bubble_idx[k];
            vmap.push([
                lo,
                lo.map(|i| i + 1),
                hi,
                hi.map(|i| i + 1),
                Some(b),
                Some(b + 1),
            ]);
            let s = s_idx[k];
            smap.push([s, s + 1, s + 2, s + 3]);
            let mut pts = Vec::with_capacity(rule.len());
            for (p, wq) in rule.points.iter().zip(&rule.weights) {
                let g = corners.geometry(*p);
                if !(g.det_jacobian > 0.0) {
                    return Err(Error::DegenerateCell {
                        cell,
                        det: g.det_jacobian,
                    });
                }
                let mut w = [[0.0; 2]; 6];
                let mut div = [0.0; 6];
                for (a, &l) in Z_DOFS.iter().enumerate() {
                    let (v, dv) = basis::rt1(l, *p);
                    w[a] = basis::piola_map(&g, v);
                    div[a] = (dv[0][0] + dv[1][1]) / g.det_jacobian;
                }
                let mut phi = [0.0; 4];
                for (j, ph) in phi.iter_mut().enumerate() {
                    *ph = basis::dq1(j, *p).0;
                }
                let (theta, dtheta) = crate::femspace::eval::scalar_at(self.theta_b, td, &g, cell, *p);
                let dx = wq * g.det_jacobian;
                for a in 0..6 {
                    if let Some(i) = vmap[k][a] {
                        gravity[i] += dx * self.constants.g * w[a][1];
                    }
                }
                pts.push(PointData {
                    dx,
                    w,
                    div,
                    phi,
                    theta,
                    dtheta,
                });
            }
            points.push(pts);
        }
        // Weak boundary term on ∂Ω₀.
        let (bcell, zeta, sign) = match self.boundary_side {
            BoundarySide::Bottom => (mesh.cell_index(column, 0), -1.0, -1.0),
            BoundarySide::Top => (mesh.cell_index(column, nl - 1), 1.0, 1.0),
        };
        let bcorners = mesh.corners(bcell);
        let mut boundary = Vec::with_capacity(frule.len());
        for (s, wq) in frule.points.iter().zip(&frule.weights) {
            let xi = [*s, zeta];
            let g = bcorners.geometry(xi);
            let theta = crate::femspace::eval::scalar_at(self.theta_b, td, &g, bcell, xi).0;
            let lo = if zeta < 0.0 { 4 } else { 6 };
            let wn = [sign * basis::rt1(lo, xi).0[1], sign * basis::rt1(lo + 1, xi).0[1]];
            boundary.push((wq * theta, wn));
        }
        Ok(ColumnCache {
            column,
            points,
            boundary,
            vmap,
            smap,
            n,
            gravity,
        })
    }

    fn boundary_layer(&self) -> usize {
        match self.boundary_side {
            BoundarySide::Bottom => 0,
            BoundarySide::Top => self.spaces.mesh.nlayers() - 1,
        }
    }

    /// Residual and Jacobian of the column system. With `pi_mode` the scalar
    /// unknowns are Exner coefficients, otherwise density coefficients.
    fn column_system(&self, c: &ColumnCache, x: &[f64], pi_mode: bool, pi0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = c.n;
        let cp = self.constants.cp;
        let mut r = c.gravity.clone();
        let mut jac = vec![0.0; n * n];
        let bl = self.boundary_layer();
        for (k, pts) in c.points.iter().enumerate() {
            let vm = &c.vmap[k];
            let sm = &c.smap[k];
            for pd in pts {
                let mut v = [0.0; 2];
                for a in 0..6 {
                    if let Some(i) = vm[a] {
                        v[0] += x[i] * pd.w[a][0];
                        v[1] += x[i] * pd.w[a][1];
                    }
                }
                let s: f64 = (0..4).map(|j| x[sm[j]] * pd.phi[j]).sum();
                let (pi, dpi) = if pi_mode {
                    (s, 1.0)
                } else {
                    let (pi, dr, _) = exner(s, pd.theta, &self.constants).map_err(|_| Error::Balance {
                        column: c.column,
                        reason: format!("nonpositive density {s:e} in layer {k}"),
                    })?;
                    (pi, dr)
                };
                // div(w θ) for each vertical test function.
                let mut dwt = [0.0; 6];
                for a in 0..6 {
                    dwt[a] = pd.theta * pd.div[a] + pd.w[a][0] * pd.dtheta[0] + pd.w[a][1] * pd.dtheta[1];
                }
                for a in 0..6 {
                    let Some(i) = vm[a] else { continue };
                    r[i] += pd.dx * (pd.w[a][0] * v[0] + pd.w[a][1] * v[1] - cp * pi * dwt[a]);
                    for b in 0..6 {
                        if let Some(j) = vm[b] {
                            jac[i * n + j] += pd.dx * (pd.w[a][0] * pd.w[b][0] + pd.w[a][1] * pd.w[b][1]);
                        }
                    }
                    for jj in 0..4 {
                        jac[i * n + sm[jj]] -= pd.dx * cp * dpi * dwt[a] * pd.phi[jj];
                    }
                }
                let divvt: f64 = (0..6).filter_map(|b| vm[b].map(|j| x[j] * dwt[b])).sum();
                for jj in 0..4 {
                    let i = sm[jj];
                    r[i] += pd.dx * cp * divvt * pd.phi[jj];
                    for b in 0..6 {
                        if let Some(j) = vm[b] {
                            jac[i * n + j] += pd.dx * cp * dwt[b] * pd.phi[jj];
                        }
                    }
                }
            }
        }
        let (lo, hi) = match self.boundary_side {
            BoundarySide::Bottom => (0, 1),
            BoundarySide::Top => (2, 3),
        };
        for (wt, wn) in &c.boundary {
            for (a, wna) in [(lo, wn[0]), (hi, wn[1])] {
                if let Some(i) = c.vmap[bl][a] {
                    r[i] += cp * pi0 * wt * wna;
                }
            }
        }
        Ok((r, jac))
    }

    fn solve_dense(&self, column: usize, n: usize, jac: Vec<f64>, rhs: &mut [f64]) -> Result<()> {
        let lu = BandedMatrix::from_dense(n, &jac).factor(column).map_err(|e| Error::Balance {
            column,
            reason: format!("singular column system: {e}"),
        })?;
        lu.solve(rhs);
        Ok(())
    }

    fn linear_column(&self, c: &ColumnCache, pi0: f64) -> Result<Vec<f64>> {
        let zero = vec![0.0; c.n];
        let (r, jac) = self.column_system(c, &zero, true, pi0)?;
        let mut x: Vec<f64> = r.iter().map(|v| -v).collect();
        self.solve_dense(c.column, c.n, jac, &mut x)?;
        Ok(x)
    }

    /// Initial density guess: cellwise projection of `p0 Π^{1/e} / (R θ_b)`.
    fn density_guess(&self, c: &ColumnCache, x_pi: &[f64]) -> Result<Vec<f64>> {
        let mut x = x_pi.to_vec();
        for (k, pts) in c.points.iter().enumerate() {
            let sm = &c.smap[k];
            let mut m = vec![0.0; 16];
            let mut b = [0.0; 4];
            for pd in pts {
                let pi: f64 = (0..4).map(|j| x_pi[sm[j]] * pd.phi[j]).sum();
                if !(pi > 0.0) {
                    return Err(Error::Balance {
                        column: c.column,
                        reason: format!("nonpositive Exner pressure {pi:e} in layer {k}"),
                    });
                }
                let rho = rho_from_exner(pi, pd.theta, &self.constants);
                for i in 0..4 {
                    b[i] += pd.dx * pd.phi[i] * rho;
                    for j in 0..4 {
                        m[i * 4 + j] += pd.dx * pd.phi[i] * pd.phi[j];
                    }
                }
            }
            let lu = crate::solver::dense::DenseLu::factor(4, m)?;
            lu.solve(&mut b);
            for j in 0..4 {
                x[sm[j]] = b[j];
            }
        }
        Ok(x)
    }

    /// Newton iteration on (v, rho); returns the solution and iteration count.
    fn newton_column(&self, c: &ColumnCache, pi0: f64, mut x: Vec<f64>) -> Result<(Vec<f64>, usize, f64)> {
        let gnorm = norm(&c.gravity).max(f64::MIN_POSITIVE);
        let mut its = 0;
        loop {
            let (r, jac) = self.column_system(c, &x, false, pi0)?;
            let rn = norm(&r);
            if rn <= NEWTON_REL_TOL * gnorm {
                return Ok((x, its, rn / gnorm));
            }
            if its >= NEWTON_MAX_ITS {
                return Err(Error::Balance {
                    column: c.column,
                    reason: format!("Newton did not converge (relative residual {:e})", rn / gnorm),
                });
            }
            let mut dx: Vec<f64> = r.iter().map(|v| -v).collect();
            self.solve_dense(c.column, c.n, jac, &mut dx)?;
            its += 1;
            // Shorten the step if it would make the density nonpositive.
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + lambda * b).collect();
                match self.column_system(c, &xt, false, pi0) {
                    Ok((rt, _)) if norm(&rt) < rn => {
                        x = xt;
                        accepted = true;
                        break;
                    }
                    _ => lambda *= 0.5,
                }
            }
            if !accepted {
                // Residual at roundoff level: the step no longer reduces it.
                let rel = rn / gnorm;
                if rel < 1e-9 {
                    return Ok((x, its, rel));
                }
                return Err(Error::Balance {
                    column: c.column,
                    reason: format!("Newton stagnated (relative residual {rel:e})"),
                });
            }
        }
    }

    fn scatter_scalars(&self, c: &ColumnCache, x: &[f64], out: &mut [f64]) {
        let mesh = &self.spaces.mesh;
        for k in 0..mesh.nlayers() {
            let cell = mesh.cell_index(c.column, k);
            for (j, &g) in self.spaces.density.cell_dofs(cell).iter().enumerate() {
                out[g] = x[c.smap[k][j]];
            }
        }
    }

    fn scatter_velocity(&self, c: &ColumnCache, x: &[f64], out: &mut [f64]) {
        let mesh = &self.spaces.mesh;
        for k in 0..mesh.nlayers() {
            let cell = mesh.cell_index(c.column, k);
            let dofs = self.spaces.velocity.cell_dofs(cell);
            for (a, &l) in Z_DOFS.iter().enumerate() {
                if let Some(i) = c.vmap[k][a] {
                    out[dofs[l]] = x[i];
                }
            }
        }
    }

    fn caches(&self) -> Result<Vec<ColumnCache>> {
        (0..self.spaces.mesh.ncols())
            .into_par_iter()
            .map(|col| self.cache(col))
            .collect()
    }

    /// Linear solve with the Exner pressure as independent bilinear unknown.
    /// Returns `(Pi_b, v)`.
    pub fn exner_linear(&self) -> Result<(Field, Field)> {
        let caches = self.caches()?;
        let sols: Vec<Result<Vec<f64>>> = caches
            .par_iter()
            .map(|c| self.linear_column(c, self.pi_boundary_value))
            .collect();
        let mut pi = Field::zeros(&self.spaces.density);
        let mut v = Field::zeros(&self.spaces.velocity);
        for (c, x) in caches.iter().zip(sols) {
            let x = x?;
            self.scatter_scalars(c, &x, &mut pi.coefficients);
            self.scatter_velocity(c, &x, &mut v.coefficients);
        }
        Ok((pi, v))
    }

    /// Linear Exner solve of one column.
    pub fn exner_linear_column(&self, column: usize) -> Result<(Field, Field)> {
        let c = self.cache(column)?;
        let x = self.linear_column(&c, self.pi_boundary_value)?;
        let mut pi = Field::zeros(&self.spaces.density);
        let mut v = Field::zeros(&self.spaces.velocity);
        self.scatter_scalars(&c, &x, &mut pi.coefficients);
        self.scatter_velocity(&c, &x, &mut v.coefficients);
        Ok((pi, v))
    }

    fn solve_column_rho(&self, c: &ColumnCache, pi0: f64) -> Result<(Vec<f64>, Vec<f64>, usize, f64)> {
        let x_pi = self.linear_column(c, pi0)?;
        let guess = self.density_guess(c, &x_pi)?;
        let (x, its, rel) = self.newton_column(c, pi0, guess)?;
        Ok((x_pi, x, its, rel))
    }

    /// Balanced density for every column.
    pub fn solve_rho(&self) -> Result<BalanceResult> {
        let caches = self.caches()?;
        let sols: Vec<_> = caches
            .par_iter()
            .map(|c| self.solve_column_rho(c, self.pi_boundary_value))
            .collect();
        let mut rho = Field::zeros(&self.spaces.density);
        let mut pi_linear = Field::zeros(&self.spaces.density);
        let mut v = Field::zeros(&self.spaces.velocity);
        let mut max_its = 0;
        let mut max_rel: f64 = 0.0;
        for (c, s) in caches.iter().zip(sols) {
            let (x_pi, x, its, rel) = s?;
            self.scatter_scalars(c, &x_pi, &mut pi_linear.coefficients);
            self.scatter_scalars(c, &x, &mut rho.coefficients);
            self.scatter_velocity(c, &x, &mut v.coefficients);
            max_its = max_its.max(its);
            max_rel = max_rel.max(rel);
        }
        Ok(BalanceResult {
            rho,
            pi_linear,
            v,
            max_newton_its: max_its,
            max_relative_residual: max_rel,
        })
    }

    /// Exner pressure `Pi(rho, theta_b)` at reference point `xi` of a cell.
    fn exner_at(&self, c: &ColumnCache, x: &[f64], layer: usize, xi: [f64; 2]) -> Result<f64> {
        let mesh = &self.spaces.mesh;
        let cell = mesh.cell_index(c.column, layer);
        let rho: f64 = (0..4).map(|j| x[c.smap[layer][j]] * basis::dq1(j, xi).0).sum();
        let g = mesh.corners(cell).geometry(xi);
        let theta = crate::femspace::eval::scalar_at(self.theta_b, &self.spaces.theta, &g, cell, xi).0;
        Ok(exner(rho, theta, &self.constants)?.0)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Balanced density with `Π = pi_boundary_value` on `side`.
pub fn balance_rho_newton(
    spaces: &Spaces,
    theta_b: &Field,
    pi_boundary_value: f64,
    side: BoundarySide,
    constants: PhysicalConstants,
) -> Result<BalanceResult> {
    BalanceProblem::new(spaces, theta_b, pi_boundary_value, side, constants).solve_rho()
}

/// Linear Exner balance `(Pi_b, v)` with `Π = pi_boundary_value` on `side`.
pub fn balance_exner_linear(
    spaces: &Spaces,
    theta_b: &Field,
    pi_boundary_value: f64,
    side: BoundarySide,
    constants: PhysicalConstants,
) -> Result<(Field, Field)> {
    BalanceProblem::new(spaces, theta_b, pi_boundary_value, side, constants).exner_linear()
}

/// Column whose centre has the largest `|x|` (lowest index on ties), used as the
/// reference far from orography centred at `x = 0`.
pub fn reference_column(spaces: &Spaces) -> usize {
    let mesh = &spaces.mesh;
    let mut best = 0;
    let mut best_x = f64::NEG_INFINITY;
    for i in 0..mesh.ncols() {
        let xc = (0.5 * (mesh.line_x(i) + mesh.line_x(i + 1))).abs();
        if xc > best_x {
            best_x = xc;
            best = i;
        }
    }
    best
}

/// Surface Exner pressure at the bottom-facet midpoint of `column` when the
/// balance is solved top-down with `Π = pi_top` on the top boundary.
pub fn surface_pi_for_top(
    spaces: &Spaces,
    theta_b: &Field,
    pi_top: f64,
    column: usize,
    constants: PhysicalConstants,
) -> Result<f64> {
    let p = BalanceProblem::new(spaces, theta_b, pi_top, BoundarySide::Top, constants);
    let c = p.cache(column)?;
    let (_, x, _, _) = p.solve_column_rho(&c, pi_top)?;
    p.exner_at(&c, &x, 0, [0.0, -1.0])
}

/// Top-boundary Exner value giving `target_surface_pi` at the surface of the
/// reference column, found by a secant iteration safeguarded by bisection.
pub fn find_top_pi(
    spaces: &Spaces,
    theta_b: &Field,
    target_surface_pi: f64,
    reference_column: usize,
    constants: PhysicalConstants,
) -> Result<f64> {
    const TOL: f64 = 1e-10;
    let f = |p: f64| -> Result<f64> {
        Ok(surface_pi_for_top(spaces, theta_b, p, reference_column, constants)? - target_surface_pi)
    };
    // Initial guess: top value of the linear bottom-up solve.
    let up = BalanceProblem::new(spaces, theta_b, target_surface_pi, BoundarySide::Bottom, constants);
    let c = up.cache(reference_column)?;
    let x = up.linear_column(&c, target_surface_pi)?;
    let nl = spaces.mesh.nlayers();
    let p0: f64 = (0..4)
        .map(|j| x[c.smap[nl - 1][j]] * basis::dq1(j, [0.0, 1.0]).0)
        .sum();
    if !(p0 > 0.0) {
        return Err(Error::Bracketing(format!("nonpositive initial top value {p0}")));
    }
    let mut a = p0;
    let mut fa = f(a)?;
    if fa.abs() <= TOL {
        return Ok(a);
    }
    let mut b = p0 * (1.0 - 1e-3 * fa.signum());
    let mut fb = f(b)?;
    // Bracket (lo with f < 0, hi with f > 0) once found.
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let note = |p: f64, fp: f64, lo: &mut Option<(f64, f64)>, hi: &mut Option<(f64, f64)>| {
        if fp < 0.0 && lo.is_none_or(|(q, _)| p > q) {
            *lo = Some((p, fp));
        }
        if fp > 0.0 && hi.is_none_or(|(q, _)| p < q) {
            *hi = Some((p, fp));
        }
    };
    note(a, fa, &mut lo, &mut hi);
    note(b, fb, &mut lo, &mut hi);
    for _ in 0..100 {
        if fb.abs() <= TOL {
            return Ok(b);
        }
        let mut next = if fb != fa { b - fb * (b - a) / (fb - fa) } else { f64::NAN };
        if let (Some((l, _)), Some((h, _))) = (lo, hi) {
            let (l, h) = (l.min(h), l.max(h));
            if !(next > l && next < h) {
                next = 0.5 * (l + h);
            }
        } else if !(next.is_finite() && next > 0.0) {
            next = b * (1.0 - 1e-2 * fb.signum());
        }
        a = b;
        fa = fb;
        b = next;
        fb = f(b)?;
        note(b, fb, &mut lo, &mut hi);
    }
    Err(Error::Bracketing(format!(
        "top Exner value did not converge (last residual {fb:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::femspace::project::project_scalar;
    use crate::mesh::ExtrudedMesh;

    fn column(nl: usize) -> (Spaces, Field) {
        let mesh = ExtrudedMesh::new(2, nl, 1000.0, 6400.0, 0.0).unwrap();
        let spaces = Spaces::new(mesh, false);
        let theta = project_scalar(|_, _| 300.0, &spaces.theta, &spaces.mesh, 6).unwrap();
        (spaces, theta)
    }

    #[test]
    fn linear_exner_is_exact_for_isentropic_column() {
        let (spaces, theta) = column(16);
        let c = PhysicalConstants::standard();
        let (pi, v) = balance_exner_linear(&spaces, &theta, 1.0, BoundarySide::Bottom, c).unwrap();
        for (cell, z) in [(0usize, 0.0), (5, 2200.0), (15, 6400.0)] {
            let m = &spaces.mesh;
            let (col, k) = m.cell_position(cell);
            let _ = col;
            let zeta = 2.0 * (z - k as f64 * 400.0) / 400.0 - 1.0;
            let val: f64 = (0..4)
                .map(|j| pi.coefficients[spaces.density.cell_dofs(cell)[j]] * basis::dq1(j, [0.3, zeta]).0)
                .sum();
            let exact = 1.0 - c.g * z / (c.cp * 300.0);
            assert!((val - exact).abs() < 1e-10, "{val} vs {exact}");
        }
        assert!(v.coefficients.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn zero_gravity_gives_constant_exner() {
        let (spaces, theta) = column(4);
        let c = PhysicalConstants::standard().with_gravity(0.0);
        let (pi, _) = balance_exner_linear(&spaces, &theta, 0.97, BoundarySide::Bottom, c).unwrap();
        assert!(pi.coefficients.iter().all(|p| (p - 0.97).abs() < 1e-12));
    }

    #[test]
    fn top_value_converges_to_isentropic_formula() {
        let c = PhysicalConstants::standard();
        let exact = 1.0 - c.g * 6400.0 / (c.cp * 300.0);
        let mut errs = Vec::new();
        for nl in [8, 16] {
            let (spaces, theta) = column(nl);
            let top = find_top_pi(&spaces, &theta, 1.0, 0, c).unwrap();
            errs.push((top - exact).abs());
            let s1 = surface_pi_for_top(&spaces, &theta, top, 0, c).unwrap();
            let s2 = surface_pi_for_top(&spaces, &theta, top + 1e-3, 0, c).unwrap();
            assert!((s1 - 1.0).abs() <= 1e-10);
            assert!(s2 > s1);
        }
        assert!(errs[0] < 1e-3, "{errs:?}");
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
    }
}
