//! Global residual and Jacobian assembly of the implicit-midpoint system.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::femspace::basis;
use crate::femspace::quadrature::{interval_rule, square_rule, QuadratureRule};
use crate::forms::constants::ModelParams;
use crate::forms::kernels::{
    cell_integrand, facet_integrand, FacetPoint, CELL_QUANTITY_SLOT, FACET_QUANTITY_SLOT, NUM_CELL_QUANTITIES,
    NUM_FACET_QUANTITIES, NUM_MID_QUANTITIES, NUM_SLOTS,
};
use crate::forms::scalar::Dual;
use crate::forms::state::{Spaces, State};
use crate::mesh::{CellGeometry, FacetKind, FacetRef, LOCAL_BOTTOM, LOCAL_LEFT, LOCAL_RIGHT, LOCAL_TOP};
use crate::solver::csr::CsrMatrix;

/// Local dofs per cell in the fixed layout u (12) | u_y (4) | rho (4) | theta (6).
pub const NL: usize = 26;
const LOC_UY: usize = 12;
const LOC_RHO: usize = 16;
const LOC_THETA: usize = 20;

/// Local dof range carrying nonzero values in each test slot.
const SLOT_RANGE: [(usize, usize); NUM_SLOTS] = [
    (0, 12),
    (0, 12),
    (0, 12),
    (0, 12),
    (0, 12),
    (0, 12),
    (LOC_UY, LOC_RHO),
    (LOC_UY, LOC_RHO),
    (LOC_UY, LOC_RHO),
    (LOC_RHO, LOC_THETA),
    (LOC_RHO, LOC_THETA),
    (LOC_RHO, LOC_THETA),
    (LOC_THETA, NL),
    (LOC_THETA, NL),
    (LOC_THETA, NL),
];

/// Physical test-slot values of every local basis function at one point.
type SlotTable = [[f64; NL]; NUM_SLOTS];

fn slot_table(geom: &CellGeometry, xi: [f64; 2]) -> SlotTable {
    let mut t = [[0.0; NL]; NUM_SLOTS];
    for j in 0..12 {
        let (v, dv) = basis::rt1(j, xi);
        let pv = basis::piola_map(geom, v);
        let pg = basis::piola_gradient(geom, v, dv);
        t[0][j] = pv[0];
        t[1][j] = pv[1];
        t[2][j] = pg[0][0];
        t[3][j] = pg[0][1];
        t[4][j] = pg[1][0];
        t[5][j] = pg[1][1];
    }
    for j in 0..4 {
        let (v, g) = basis::dq1(j, xi);
        let pg = basis::scalar_gradient(geom, g);
        t[6][LOC_UY + j] = v;
        t[7][LOC_UY + j] = pg[0];
        t[8][LOC_UY + j] = pg[1];
        t[9][LOC_RHO + j] = v;
        t[10][LOC_RHO + j] = pg[0];
        t[11][LOC_RHO + j] = pg[1];
    }
    for j in 0..6 {
        let (v, g) = basis::theta(j, xi);
        let pg = basis::scalar_gradient(geom, g);
        t[12][LOC_THETA + j] = v;
        t[13][LOC_THETA + j] = pg[0];
        t[14][LOC_THETA + j] = pg[1];
    }
    t
}

#[inline]
fn slot_value(t: &SlotTable, s: usize, c: &[f64; NL]) -> f64 {
    let (a, b) = SLOT_RANGE[s];
    let mut v = 0.0;
    for j in a..b {
        v += t[s][j] * c[j];
    }
    v
}

/// Reference point on local facet `lf` at facet parameter `s`.
fn facet_ref_point(lf: usize, s: f64) -> [f64; 2] {
    match lf {
        LOCAL_LEFT => [-1.0, s],
        LOCAL_RIGHT => [1.0, s],
        LOCAL_BOTTOM => [s, -1.0],
        LOCAL_TOP => [s, 1.0],
        _ => unreachable!(),
    }
}

struct CellLocal {
    dofs: [usize; NL],
    res: [f64; NL],
    jac: Option<Box<[[f64; NL]; NL]>>,
}

struct FacetLocal {
    dofs: [[usize; NL]; 2],
    res: [[f64; NL]; 2],
    jac: Option<Box<[[[[f64; NL]; NL]; 2]; 2]>>,
}

/// Residual/Jacobian assembler bound to one set of spaces and parameters.
#[derive(Debug, Clone)]
pub struct Assembler {
    pub spaces: Spaces,
    pub params: ModelParams,
    cell_rule: QuadratureRule<[f64; 2]>,
    facet_rule: QuadratureRule<f64>,
    pattern: CsrMatrix,
    constrained: Vec<bool>,
    constrained_list: Vec<usize>,
    mass_diag: Vec<f64>,
    interior_facets: Vec<(FacetRef, f64)>,
    /// Value positions in `pattern` of each local cell block, row-major.
    cell_pos: Vec<u32>,
    /// Value positions of the four blocks `[a][b]` of each interior facet.
    facet_pos: Vec<u32>,
}

const ABSENT: usize = usize::MAX;
const NO_POS: u32 = u32::MAX;

impl Assembler {
    pub fn new(spaces: Spaces, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let cell_rule = square_rule(params.quad_degree);
        let facet_rule = interval_rule(params.quad_degree);
        let mesh = &spaces.mesh;
        let mut interior_facets = Vec::new();
        for (_, f) in mesh.interior_facets() {
            interior_facets.push((*f, mesh.facet_meshscale(f)?));
        }
        let constrained = spaces.constrained_mask();
        let constrained_list = spaces.constrained();
        let mut a = Assembler {
            pattern: CsrMatrix::from_pattern(0, 0, Vec::new()),
            spaces,
            params,
            cell_rule,
            facet_rule,
            constrained,
            constrained_list,
            mass_diag: Vec::new(),
            interior_facets,
            cell_pos: Vec::new(),
            facet_pos: Vec::new(),
        };
        a.pattern = a.build_pattern();
        a.mass_diag = a.compute_mass_diagonal();
        if a.pattern.nnz() >= NO_POS as usize {
            return Err(Error::InvalidArgument("Jacobian too large for 32-bit positions".into()));
        }
        a.build_positions();
        Ok(a)
    }

    pub fn num_dofs(&self) -> usize {
        self.spaces.num_dofs()
    }

    pub fn pattern(&self) -> &CsrMatrix {
        &self.pattern
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained_list
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    /// Diagonal of the mass matrix of the time-derivative terms.
    pub fn mass_diagonal(&self) -> &[f64] {
        &self.mass_diag
    }

    fn cell_dofs(&self, cell: usize) -> [usize; NL] {
        let s = &self.spaces;
        let mut d = [ABSENT; NL];
        d[..12].copy_from_slice(s.velocity.cell_dofs(cell));
        if let Some(m) = &s.y_velocity {
            for (k, g) in m.cell_dofs(cell).iter().enumerate() {
                d[LOC_UY + k] = g + s.offset_uy();
            }
        }
        for (k, g) in s.density.cell_dofs(cell).iter().enumerate() {
            d[LOC_RHO + k] = g + s.offset_rho();
        }
        for (k, g) in s.theta.cell_dofs(cell).iter().enumerate() {
            d[LOC_THETA + k] = g + s.offset_theta();
        }
        d
    }

    fn build_pattern(&self) -> CsrMatrix {
        let n = self.num_dofs();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut add_block = |ra: &[usize; NL], cb: &[usize; NL]| {
            for &i in ra.iter().filter(|i| **i != ABSENT) {
                rows[i].extend(cb.iter().copied().filter(|j| *j != ABSENT));
            }
        };
        for cell in 0..self.spaces.mesh.num_cells() {
            let d = self.cell_dofs(cell);
            add_block(&d, &d);
        }
        for (f, _) in &self.interior_facets {
            let a = self.cell_dofs(f.plus_cell);
            let b = self.cell_dofs(f.minus_cell.expect("interior facet"));
            add_block(&a, &b);
            add_block(&b, &a);
        }
        for (i, r) in rows.iter_mut().enumerate() {
            r.push(i);
        }
        CsrMatrix::from_pattern(n, n, rows)
    }

    fn block_positions(&self, rows: &[usize; NL], cols: &[usize; NL], out: &mut Vec<u32>) {
        for &i in rows {
            for &j in cols {
                let p = if i == ABSENT || j == ABSENT {
                    NO_POS
                } else {
                    self.pattern.position(i, j).expect("block inside pattern") as u32
                };
                out.push(p);
            }
        }
    }

    fn build_positions(&mut self) {
        let mut cell_pos = Vec::with_capacity(self.spaces.mesh.num_cells() * NL * NL);
        for cell in 0..self.spaces.mesh.num_cells() {
            let d = self.cell_dofs(cell);
            self.block_positions(&d, &d, &mut cell_pos);
        }
        let mut facet_pos = Vec::with_capacity(self.interior_facets.len() * 4 * NL * NL);
        for (f, _) in &self.interior_facets {
            let d = [
                self.cell_dofs(f.plus_cell),
                self.cell_dofs(f.minus_cell.expect("interior facet")),
            ];
            for a in 0..2 {
                for b in 0..2 {
                    self.block_positions(&d[a], &d[b], &mut facet_pos);
                }
            }
        }
        self.cell_pos = cell_pos;
        self.facet_pos = facet_pos;
    }

    fn compute_mass_diagonal(&self) -> Vec<f64> {
        let mesh = &self.spaces.mesh;
        let mut diag = vec![0.0; self.num_dofs()];
        for cell in 0..mesh.num_cells() {
            let corners = mesh.corners(cell);
            let d = self.cell_dofs(cell);
            for (p, w) in self.cell_rule.points.iter().zip(&self.cell_rule.weights) {
                let g = corners.geometry(*p);
                let t = slot_table(&g, *p);
                let dx = w * g.det_jacobian;
                for j in 0..NL {
                    if d[j] == ABSENT {
                        continue;
                    }
                    let v = t[0][j] * t[0][j] + t[1][j] * t[1][j] + t[6][j] * t[6][j] + t[9][j] * t[9][j] + t[12][j] * t[12][j];
                    diag[d[j]] += dx * v;
                }
            }
        }
        diag
    }

    /// Gather local coefficients, treating constrained dofs as zero.
    fn gather(&self, v: &[f64], dofs: &[usize; NL]) -> [f64; NL] {
        let mut c = [0.0; NL];
        for j in 0..NL {
            let g = dofs[j];
            if g != ABSENT && !self.constrained[g] {
                c[j] = v[g];
            }
        }
        c
    }

    fn cell_local(&self, cell: usize, new: &[f64], old: &[f64], dt: f64, want_jac: bool) -> Result<CellLocal> {
        let dofs = self.cell_dofs(cell);
        let cn = self.gather(new, &dofs);
        let co = self.gather(old, &dofs);
        let mut mid = [0.0; NL];
        let mut rate = [0.0; NL];
        for j in 0..NL {
            mid[j] = 0.5 * (cn[j] + co[j]);
            rate[j] = (cn[j] - co[j]) / dt;
        }
        let corners = self.spaces.mesh.corners(cell);
        let mut res = [0.0; NL];
        let mut jac = if want_jac { Some(Box::new([[0.0; NL]; NL])) } else { None };
        let factor = |q: usize| if q < NUM_MID_QUANTITIES { 0.5 } else { 1.0 / dt };
        for (p, w) in self.cell_rule.points.iter().zip(&self.cell_rule.weights) {
            let geom = corners.geometry(*p);
            if !(geom.det_jacobian > 0.0) {
                return Err(Error::DegenerateCell {
                    cell,
                    det: geom.det_jacobian,
                });
            }
            let t = slot_table(&geom, *p);
            let mut pq = [0.0; NUM_CELL_QUANTITIES];
            for q in 0..NUM_CELL_QUANTITIES {
                let c = if q < NUM_MID_QUANTITIES { &mid } else { &rate };
                pq[q] = slot_value(&t, CELL_QUANTITY_SLOT[q], c);
            }
            check_positive(pq[9], pq[10], cell)?;
            let mu = self.params.mu(geom.point[1]);
            let dx = w * geom.det_jacobian;
            let g: [f64; NUM_SLOTS] = match jac.as_mut() {
                None => cell_integrand::<f64>(&pq, mu, &self.params),
                Some(jl) => {
                    let mut pd = [Dual::<NUM_CELL_QUANTITIES>::var(0.0, 0); NUM_CELL_QUANTITIES];
                    for q in 0..NUM_CELL_QUANTITIES {
                        pd[q] = Dual::var(pq[q], q);
                    }
                    let gd = cell_integrand(&pd, mu, &self.params);
                    // C[s][k] = sum_q dg_s/dP_q * factor_q * T[slot_q][k]
                    let mut cmat = [[0.0; NL]; NUM_SLOTS];
                    for s in 0..NUM_SLOTS {
                        for q in 0..NUM_CELL_QUANTITIES {
                            let a = gd[s].d[q];
                            if a == 0.0 {
                                continue;
                            }
                            let a = a * factor(q);
                            let sq = CELL_QUANTITY_SLOT[q];
                            let (k0, k1) = SLOT_RANGE[sq];
                            for k in k0..k1 {
                                cmat[s][k] += a * t[sq][k];
                            }
                        }
                    }
                    for s in 0..NUM_SLOTS {
                        let (j0, j1) = SLOT_RANGE[s];
                        for j in j0..j1 {
                            let tj = dx * t[s][j];
                            if tj == 0.0 {
                                continue;
                            }
                            let row = &mut jl[j];
                            for k in 0..NL {
                                row[k] += tj * cmat[s][k];
                            }
                        }
                    }
                    gd.map(|x| x.v)
                }
            };
            for s in 0..NUM_SLOTS {
                let (j0, j1) = SLOT_RANGE[s];
                let gs = dx * g[s];
                for j in j0..j1 {
                    res[j] += gs * t[s][j];
                }
            }
        }
        Ok(CellLocal { dofs, res, jac })
    }

    fn facet_local(&self, facet: &FacetRef, h: f64, new: &[f64], old: &[f64], want_jac: bool) -> Result<FacetLocal> {
        let cells = [facet.plus_cell, facet.minus_cell.expect("interior facet")];
        let mut dofs = [[ABSENT; NL]; 2];
        let mut mid = [[0.0; NL]; 2];
        for side in 0..2 {
            dofs[side] = self.cell_dofs(cells[side]);
            let cn = self.gather(new, &dofs[side]);
            let co = self.gather(old, &dofs[side]);
            for j in 0..NL {
                mid[side][j] = 0.5 * (cn[j] + co[j]);
            }
        }
        let corners = [self.spaces.mesh.corners(cells[0]), self.spaces.mesh.corners(cells[1])];
        let fp = FacetPoint {
            normal: facet.normal,
            vertical: facet.kind == FacetKind::InteriorVertical,
            h,
        };
        let mut res = [[0.0; NL]; 2];
        let mut jac = if want_jac {
            Some(Box::new([[[[0.0; NL]; NL]; 2]; 2]))
        } else {
            None
        };
        const NF: usize = NUM_FACET_QUANTITIES;
        for (s_par, w) in self.facet_rule.points.iter().zip(&self.facet_rule.weights) {
            let ds = w * 0.5 * facet.area;
            let mut tabs = [[[0.0; NL]; NUM_SLOTS]; 2];
            let mut pq = [[0.0; NF]; 2];
            for side in 0..2 {
                let xi = facet_ref_point(facet.local_facet_ids[side], *s_par);
                let geom = corners[side].geometry(xi);
                tabs[side] = slot_table(&geom, xi);
                for q in 0..NF {
                    pq[side][q] = slot_value(&tabs[side], FACET_QUANTITY_SLOT[q], &mid[side]);
                }
                check_positive(pq[side][9], pq[side][10], cells[side])?;
            }
            let g: [[f64; NUM_SLOTS]; 2] = match jac.as_mut() {
                None => {
                    let (ga, gb) = facet_integrand::<f64>(&pq[0], &pq[1], &fp, &self.params);
                    [ga, gb]
                }
                Some(jl) => {
                    let mut a = [Dual::<{ 2 * NF }>::var(0.0, 0); NF];
                    let mut b = a;
                    for q in 0..NF {
                        a[q] = Dual::var(pq[0][q], q);
                        b[q] = Dual::var(pq[1][q], NF + q);
                    }
                    let (ga, gb) = facet_integrand(&a, &b, &fp, &self.params);
                    let gd = [ga, gb];
                    for oa in 0..2 {
                        for ib in 0..2 {
                            let mut cmat = [[0.0; NL]; NUM_SLOTS];
                            let mut any = false;
                            for s in 0..NUM_SLOTS {
                                for q in 0..NF {
                                    let d = gd[oa][s].d[ib * NF + q];
                                    if d == 0.0 {
                                        continue;
                                    }
                                    any = true;
                                    let d = 0.5 * d;
                                    let sq = FACET_QUANTITY_SLOT[q];
                                    let (k0, k1) = SLOT_RANGE[sq];
                                    for k in k0..k1 {
                                        cmat[s][k] += d * tabs[ib][sq][k];
                                    }
                                }
                            }
                            if !any {
                                continue;
                            }
                            let blk = &mut jl[oa][ib];
                            for s in 0..NUM_SLOTS {
                                let (j0, j1) = SLOT_RANGE[s];
                                for j in j0..j1 {
                                    let tj = ds * tabs[oa][s][j];
                                    if tj == 0.0 {
                                        continue;
                                    }
                                    for k in 0..NL {
                                        blk[j][k] += tj * cmat[s][k];
                                    }
                                }
                            }
                        }
                    }
                    [ga.map(|x| x.v), gb.map(|x| x.v)]
                }
            };
            for side in 0..2 {
                for s in 0..NUM_SLOTS {
                    let (j0, j1) = SLOT_RANGE[s];
                    let gs = ds * g[side][s];
                    if gs == 0.0 {
                        continue;
                    }
                    for j in j0..j1 {
                        res[side][j] += gs * tabs[side][s][j];
                    }
                }
            }
        }
        Ok(FacetLocal { dofs, res, jac })
    }

    fn check_inputs(&self, new: &[f64], old: &[f64], dt: f64) -> Result<()> {
        let n = self.num_dofs();
        if new.len() != n || old.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: new.len().min(old.len()),
            });
        }
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid time step {dt}")));
        }
        Ok(())
    }

    /// Residual and, optionally, Jacobian of the implicit-midpoint system.
    pub fn assemble(&self, new: &[f64], old: &[f64], dt: f64, want_jac: bool) -> Result<(Vec<f64>, Option<CsrMatrix>)> {
        self.check_inputs(new, old, dt)?;
        let n = self.num_dofs();
        let mut r = vec![0.0; n];
        let mut jac = if want_jac {
            let mut m = self.pattern.clone();
            m.fill_zero();
            Some(m)
        } else {
            None
        };
        let ncells = self.spaces.mesh.num_cells();
        const CHUNK: usize = 1024;
        const BLOCK: usize = NL * NL;
        for start in (0..ncells).step_by(CHUNK) {
            let end = (start + CHUNK).min(ncells);
            let locals: Vec<Result<CellLocal>> = (start..end)
                .into_par_iter()
                .map(|c| self.cell_local(c, new, old, dt, want_jac))
                .collect();
            for (c, l) in (start..end).zip(locals) {
                let l = l?;
                add_residual(&mut r, &l.dofs, &l.res);
                if let (Some(m), Some(b)) = (jac.as_mut(), l.jac.as_deref()) {
                    add_block(m.values_mut(), &self.cell_pos[c * BLOCK..(c + 1) * BLOCK], b);
                }
            }
        }
        let nf = self.interior_facets.len();
        for start in (0..nf).step_by(CHUNK / 2) {
            let end = (start + CHUNK / 2).min(nf);
            let locals: Vec<Result<FacetLocal>> = self.interior_facets[start..end]
                .par_iter()
                .map(|(f, h)| self.facet_local(f, *h, new, old, want_jac))
                .collect();
            for (f, l) in (start..end).zip(locals) {
                let l = l?;
                for a in 0..2 {
                    add_residual(&mut r, &l.dofs[a], &l.res[a]);
                }
                if let (Some(m), Some(j)) = (jac.as_mut(), l.jac.as_ref()) {
                    let vals = m.values_mut();
                    for a in 0..2 {
                        for b in 0..2 {
                            let o = (f * 4 + a * 2 + b) * BLOCK;
                            add_block(vals, &self.facet_pos[o..o + BLOCK], &j[a][b]);
                        }
                    }
                }
            }
        }
        for &d in &self.constrained_list {
            r[d] = new[d];
        }
        if let Some(m) = jac.as_mut() {
            m.set_identity_rows_cols(&self.constrained_list);
        }
        Ok((r, jac))
    }

    pub fn residual(&self, new: &[f64], old: &[f64], dt: f64) -> Result<Vec<f64>> {
        Ok(self.assemble(new, old, dt, false)?.0)
    }

    pub fn jacobian(&self, new: &[f64], old: &[f64], dt: f64) -> Result<CsrMatrix> {
        Ok(self.assemble(new, old, dt, true)?.1.expect("jacobian requested"))
    }

    /// Row scaling that turns residual rows into coefficient increments:
    /// `|dt| / M_ii` for field rows and 1 for constrained rows.
    pub fn row_scaling(&self, dt: f64) -> Vec<f64> {
        self.mass_diag
            .iter()
            .enumerate()
            .map(|(i, m)| if self.constrained[i] || *m == 0.0 { 1.0 } else { dt.abs() / m })
            .collect()
    }

    /// Root-mean-square of the row-scaled residual, the norm Newton monitors.
    pub fn scaled_norm(&self, r: &[f64], dt: f64) -> f64 {
        let s = self.row_scaling(dt);
        let sum: f64 = r.iter().zip(&s).map(|(a, b)| (a * b) * (a * b)).sum();
        (sum / r.len().max(1) as f64).sqrt()
    }

    pub fn assemble_residual(&self, state_new: &State, state_old: &State, dt: f64) -> Result<Vec<f64>> {
        self.residual(&state_new.to_vector(), &state_old.to_vector(), dt)
    }

    pub fn assemble_jacobian(&self, state_new: &State, state_old: &State, dt: f64) -> Result<CsrMatrix> {
        self.jacobian(&state_new.to_vector(), &state_old.to_vector(), dt)
    }

    /// Total mass `integral of rho` of a state vector.
    pub fn total_mass(&self, v: &[f64]) -> f64 {
        let s = &self.spaces;
        let mut m = 0.0;
        for cell in 0..s.mesh.num_cells() {
            let corners = s.mesh.corners(cell);
            let d = s.density.cell_dofs(cell);
            for (p, w) in self.cell_rule.points.iter().zip(&self.cell_rule.weights) {
                let g = corners.geometry(*p);
                let mut rho = 0.0;
                for (j, gj) in d.iter().enumerate() {
                    rho += v[s.offset_rho() + gj] * basis::dq1(j, *p).0;
                }
                m += w * g.det_jacobian * rho;
            }
        }
        m
    }
}

fn check_positive(rho: f64, theta: f64, cell: usize) -> Result<()> {
    if !(rho > 0.0) {
        return Err(Error::NonPositive {
            field: "rho",
            value: rho,
            cell,
        });
    }
    if !(theta > 0.0) {
        return Err(Error::NonPositive {
            field: "theta",
            value: theta,
            cell,
        });
    }
    Ok(())
}

fn add_residual(r: &mut [f64], rows: &[usize; NL], res: &[f64; NL]) {
    for (&g, v) in rows.iter().zip(res) {
        if g != ABSENT {
            r[g] += v;
        }
    }
}

fn add_block(vals: &mut [f64], pos: &[u32], blk: &[[f64; NL]; NL]) {
    for (prow, brow) in pos.chunks_exact(NL).zip(blk) {
        for (&p, &v) in prow.iter().zip(brow) {
            if p != NO_POS && v != 0.0 {
                vals[p as usize] += v;
            }
        }
    }
}
