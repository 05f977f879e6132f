//! Pointwise integrands of the discrete equations.
//!
//! The residual of every test function is a sum over quadrature points of
//! `sum_s g_s * T_s`, where `T_s` are the "test slots" (values and physical
//! gradients of the test function, see [`slot`]) and `g_s` are functions of a
//! handful of field values at the point. Writing the integrands generically
//! over [`Scalar`] lets the same code produce the residual (on `f64`) and the
//! exact linearisation (on dual numbers).

use crate::forms::constants::{exner_s, ModelParams};
use crate::forms::scalar::Scalar;

/// Test slots.
pub mod slot {
    pub const WX: usize = 0;
    pub const WZ: usize = 1;
    pub const DWX_DX: usize = 2;
    pub const DWX_DZ: usize = 3;
    pub const DWZ_DX: usize = 4;
    pub const DWZ_DZ: usize = 5;
    pub const WY: usize = 6;
    pub const DWY_DX: usize = 7;
    pub const DWY_DZ: usize = 8;
    pub const PHI: usize = 9;
    pub const DPHI_DX: usize = 10;
    pub const DPHI_DZ: usize = 11;
    pub const Q: usize = 12;
    pub const DQ_DX: usize = 13;
    pub const DQ_DZ: usize = 14;
}

pub const NUM_SLOTS: usize = 15;

/// Cell point quantities: midpoint values and gradients followed by time rates.
pub mod cq {
    pub const UX: usize = 0;
    pub const UZ: usize = 1;
    pub const DUX_DX: usize = 2;
    pub const DUX_DZ: usize = 3;
    pub const DUZ_DX: usize = 4;
    pub const DUZ_DZ: usize = 5;
    pub const UY: usize = 6;
    pub const DUY_DX: usize = 7;
    pub const DUY_DZ: usize = 8;
    pub const RHO: usize = 9;
    pub const THETA: usize = 10;
    pub const DTH_DX: usize = 11;
    pub const DTH_DZ: usize = 12;
    pub const UX_T: usize = 13;
    pub const UZ_T: usize = 14;
    pub const UY_T: usize = 15;
    pub const RHO_T: usize = 16;
    pub const THETA_T: usize = 17;
}

pub const NUM_CELL_QUANTITIES: usize = 18;
/// Number of leading cell quantities that are midpoint values.
pub const NUM_MID_QUANTITIES: usize = 13;

/// Slot whose basis values produce each cell quantity.
pub const CELL_QUANTITY_SLOT: [usize; NUM_CELL_QUANTITIES] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 13, 14, 0, 1, 6, 9, 12];

/// Facet point quantities of one side (all midpoint values).
pub mod fq {
    pub const UX: usize = 0;
    pub const UZ: usize = 1;
    pub const UY: usize = 2;
    pub const DUX_DX: usize = 3;
    pub const DUX_DZ: usize = 4;
    pub const DUZ_DX: usize = 5;
    pub const DUZ_DZ: usize = 6;
    pub const DUY_DX: usize = 7;
    pub const DUY_DZ: usize = 8;
    pub const RHO: usize = 9;
    pub const THETA: usize = 10;
    pub const DTH_DX: usize = 11;
    pub const DTH_DZ: usize = 12;
}

pub const NUM_FACET_QUANTITIES: usize = 13;

pub const FACET_QUANTITY_SLOT: [usize; NUM_FACET_QUANTITIES] = [0, 1, 6, 2, 3, 4, 5, 7, 8, 9, 12, 13, 14];

/// Volume integrand at one point; `mu` is the damping coefficient there.
pub fn cell_integrand<S: Scalar>(p: &[S; NUM_CELL_QUANTITIES], mu: f64, prm: &ModelParams) -> [S; NUM_SLOTS] {
    use cq::*;
    let c = &prm.constants;
    let (ux, uz, uy) = (p[UX], p[UZ], p[UY]);
    let (rho, theta) = (p[RHO], p[THETA]);
    let ke = (ux * ux + uz * uz + uy * uy) * 0.5;
    let cppi = exner_s(rho, theta, c) * c.cp;
    let div = p[DUX_DX] + p[DUZ_DZ];
    // Two-dimensional curl terms.
    let adv_uz = uz * p[DUZ_DX] - ux * p[DUZ_DZ];
    let adv_ux = uz * p[DUX_DX] - ux * p[DUX_DZ];
    let nu = prm.nu;
    let kd = prm.theta_diffusivity;
    let frc = prm.balance_forcing;
    let mut g = [S::cst(0.0); NUM_SLOTS];
    g[slot::WX] = p[UX_T] - uy * c.f + frc[0] + adv_uz + uy * p[DUY_DX] - cppi * p[DTH_DX];
    g[slot::WZ] = p[UZ_T] + uz * mu + c.g + frc[2] - adv_ux + uy * p[DUY_DZ] - cppi * p[DTH_DZ];
    g[slot::DWX_DX] = uz * uz + uy * uy - ke - cppi * theta + p[DUX_DX] * nu;
    g[slot::DWX_DZ] = -(ux * uz) + p[DUX_DZ] * nu;
    g[slot::DWZ_DX] = -(ux * uz) + p[DUZ_DX] * nu;
    g[slot::DWZ_DZ] = ux * ux + uy * uy - ke - cppi * theta + p[DUZ_DZ] * nu;
    g[slot::WY] = p[UY_T] + ux * c.f + frc[1] - uy * div;
    g[slot::DWY_DX] = -(uy * ux) + p[DUY_DX] * nu;
    g[slot::DWY_DZ] = -(uy * uz) + p[DUY_DZ] * nu;
    g[slot::PHI] = p[RHO_T];
    g[slot::DPHI_DX] = -(ux * rho);
    g[slot::DPHI_DZ] = -(uz * rho);
    g[slot::Q] = p[THETA_T] - theta * div;
    g[slot::DQ_DX] = -(theta * ux) + p[DTH_DX] * kd;
    g[slot::DQ_DZ] = -(theta * uz) + p[DTH_DZ] * kd;
    g
}

/// Geometric data of a facet quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct FacetPoint {
    /// Unit normal pointing from the plus into the minus side.
    pub normal: [f64; 2],
    /// True for facets between neighbouring columns.
    pub vertical: bool,
    /// Cross-facet meshscale.
    pub h: f64,
}

/// Interior facet integrand: test-slot coefficients of the plus and minus sides.
pub fn facet_integrand<S: Scalar>(
    a: &[S; NUM_FACET_QUANTITIES],
    b: &[S; NUM_FACET_QUANTITIES],
    fp: &FacetPoint,
    prm: &ModelParams,
) -> ([S; NUM_SLOTS], [S; NUM_SLOTS]) {
    use fq::*;
    let c = &prm.constants;
    let n = fp.normal;
    let zero = S::cst(0.0);
    let un = ((a[UX] + b[UX]) * n[0] + (a[UZ] + b[UZ]) * n[1]) * 0.5;
    let pick = |i: usize| -> S {
        if prm.upwinding {
            if un.re() >= 0.0 {
                a[i]
            } else {
                b[i]
            }
        } else {
            (a[i] + b[i]) * 0.5
        }
    };
    let (tx, tz, ty) = (pick(UX), pick(UZ), pick(UY));
    let rho_up = pick(RHO);
    let theta_up = pick(THETA);
    let pi_avg = if fp.vertical {
        (exner_s(a[RHO], a[THETA], c) + exner_s(b[RHO], b[THETA], c)) * (0.5 * c.cp)
    } else {
        zero
    };
    let mut out = [[zero; NUM_SLOTS]; 2];
    for (side, (q, sigma)) in [(a, 1.0), (b, -1.0)].into_iter().enumerate() {
        let ns = [n[0] * sigma, n[1] * sigma];
        let g = &mut out[side];
        let un_s = q[UX] * ns[0] + q[UZ] * ns[1];
        let tu = tx * q[UX] + tz * q[UZ] + ty * q[UY];
        g[slot::WX] -= tu * ns[0] - tx * un_s;
        g[slot::WZ] -= tu * ns[1] - tz * un_s;
        g[slot::WY] += ty * un_s;
        g[slot::PHI] += un_s * rho_up;
        if fp.vertical {
            g[slot::WX] += pi_avg * q[THETA] * ns[0];
            g[slot::WZ] += pi_avg * q[THETA] * ns[1];
            g[slot::Q] += un_s * theta_up;
        }
    }
    // Edge stabilisation of the temperature gradient jump.
    let cs = un.abs() * (prm.c0 * fp.h * fp.h);
    let jx = (a[DTH_DX] - b[DTH_DX]) * cs;
    let jz = (a[DTH_DZ] - b[DTH_DZ]) * cs;
    out[0][slot::DQ_DX] += jx;
    out[0][slot::DQ_DZ] += jz;
    out[1][slot::DQ_DX] -= jx;
    out[1][slot::DQ_DZ] -= jz;
    // Symmetric interior penalty for viscosity and diffusion.
    let mut sipg = |coef: f64, val: usize, grads: [usize; 2], w: usize, dw: [usize; 2]| {
        if coef <= 0.0 {
            return;
        }
        let jump = a[val] - b[val];
        let flux = (a[grads[0]] + b[grads[0]]) * (0.5 * n[0]) + (a[grads[1]] + b[grads[1]]) * (0.5 * n[1]);
        let t = jump * (coef * prm.eta_penalty / fp.h) - flux * coef;
        out[0][w] += t;
        out[1][w] -= t;
        for j in 0..2 {
            let s = jump * (-0.5 * coef * n[j]);
            out[0][dw[j]] += s;
            out[1][dw[j]] += s;
        }
    };
    sipg(prm.nu, UX, [DUX_DX, DUX_DZ], slot::WX, [slot::DWX_DX, slot::DWX_DZ]);
    sipg(prm.nu, UZ, [DUZ_DX, DUZ_DZ], slot::WZ, [slot::DWZ_DX, slot::DWZ_DZ]);
    sipg(prm.nu, UY, [DUY_DX, DUY_DZ], slot::WY, [slot::DWY_DX, slot::DWY_DZ]);
    sipg(prm.theta_diffusivity, THETA, [DTH_DX, DTH_DZ], slot::Q, [slot::DQ_DX, slot::DQ_DZ]);
    (out[0], out[1])
}
