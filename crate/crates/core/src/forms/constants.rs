//! Physical constants, model parameters and the Exner pressure relation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub g: f64,
    pub n: f64,
    pub f: f64,
    pub cp: f64,
    pub r: f64,
    pub p0: f64,
    pub kappa: f64,
}

impl PhysicalConstants {
    pub fn new(g: f64, n: f64, f: f64, cp: f64, r: f64, p0: f64) -> Self {
        PhysicalConstants {
            g,
            n,
            f,
            cp,
            r,
            p0,
            kappa: r / cp,
        }
    }

    /// Standard values used by all slice testcases.
    pub fn standard() -> Self {
        Self::new(9.810616, 0.01, 1.0e-4, 1004.5, 287.0, 1.0e5)
    }

    pub fn with_coriolis(mut self, f: f64) -> Self {
        self.f = f;
        self
    }

    pub fn with_gravity(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    /// Exponent `kappa / (1 - kappa)` of the Exner relation.
    pub fn exner_exponent(&self) -> f64 {
        self.kappa / (1.0 - self.kappa)
    }
}

/// Exner pressure `Pi = (R rho theta / p0)^(kappa / (1 - kappa))` together with
/// its partial derivatives with respect to `rho` and `theta`.
pub fn exner(rho: f64, theta: f64, c: &PhysicalConstants) -> Result<(f64, f64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::NonPositive {
            field: "rho",
            value: rho,
            cell: usize::MAX,
        });
    }
    if !(theta > 0.0) {
        return Err(Error::NonPositive {
            field: "theta",
            value: theta,
            cell: usize::MAX,
        });
    }
    let e = c.exner_exponent();
    let pi = (c.r * rho * theta / c.p0).powf(e);
    Ok((pi, pi * e / rho, pi * e / theta))
}

/// Exner pressure for any scalar type (no positivity checks).
#[inline]
pub fn exner_s<S: Scalar>(rho: S, theta: S, c: &PhysicalConstants) -> S {
    (rho * theta * (c.r / c.p0)).powf(c.exner_exponent())
}

/// Density with the given Exner pressure and potential temperature.
pub fn rho_from_exner(pi: f64, theta: f64, c: &PhysicalConstants) -> f64 {
    c.p0 * pi.powf(1.0 / c.exner_exponent()) / (c.r * theta)
}

/// Sponge-layer damping `mu(z)`: zero below `z_b`, rising as a squared sine to
/// `mu_bar` at `top`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Damping {
    pub z_b: f64,
    pub top: f64,
    pub mu_bar: f64,
}

impl Damping {
    #[inline]
    pub fn mu(&self, z: f64) -> f64 {
        if z <= self.z_b {
            0.0
        } else {
            let s = (0.5 * std::f64::consts::PI * (z - self.z_b) / (self.top - self.z_b)).sin();
            self.mu_bar * s * s
        }
    }
}

/// Everything the forms need besides the fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub constants: PhysicalConstants,
    pub damping: Option<Damping>,
    pub nu: f64,
    pub theta_diffusivity: f64,
    pub balance_forcing: [f64; 3],
    pub eta_penalty: f64,
    pub c0: f64,
    /// Upwind facet values; when false, centred averages are used instead.
    pub upwinding: bool,
    pub quad_degree: usize,
}

impl ModelParams {
    pub fn new(constants: PhysicalConstants) -> Self {
        ModelParams {
            constants,
            damping: None,
            nu: 0.0,
            theta_diffusivity: 0.0,
            balance_forcing: [0.0; 3],
            eta_penalty: 10.0,
            c0: 2f64.powf(-3.5),
            upwinding: true,
            quad_degree: crate::femspace::DEFAULT_QUAD_DEGREE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.constants;
        if ((c.kappa - c.r / c.cp) / c.kappa).abs() > 1e-14 {
            return Err(Error::InvalidArgument("kappa must equal R / cp".into()));
        }
        if !(c.cp > 0.0 && c.r > 0.0 && c.p0 > 0.0 && c.g >= 0.0) {
            return Err(Error::InvalidArgument("constants must be positive".into()));
        }
        if self.nu < 0.0 || self.theta_diffusivity < 0.0 {
            return Err(Error::InvalidArgument("viscosity must be non-negative".into()));
        }
        if !(self.eta_penalty > 0.0 && self.c0 > 0.0) {
            return Err(Error::InvalidArgument("penalty constants must be positive".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn mu(&self, z: f64) -> f64 {
        self.damping.map_or(0.0, |d| d.mu(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_exner() {
        let c = PhysicalConstants::standard();
        let (pi, _, _) = exner(1.0, c.p0 / c.r, &c).unwrap();
        assert!((pi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exner_by_logarithms() {
        let c = PhysicalConstants::standard();
        let k = 287.0 / 1004.5;
        let expected = ((k / (1.0 - k)) * (287.0f64 * 300.0 / 1e5).ln()).exp();
        let (pi, _, _) = exner(1.0, 300.0, &c).unwrap();
        assert!((pi - expected).abs() < 1e-12);
    }

    #[test]
    fn exner_derivatives() {
        let c = PhysicalConstants::standard();
        let (rho, th) = (0.9, 310.0);
        let (_, dr, dt) = exner(rho, th, &c).unwrap();
        let e = 1e-6 * rho;
        let fd = (exner(rho + e, th, &c).unwrap().0 - exner(rho - e, th, &c).unwrap().0) / (2.0 * e);
        assert!(((fd - dr) / dr).abs() < 1e-6);
        let e = 1e-6 * th;
        let fd = (exner(rho, th + e, &c).unwrap().0 - exner(rho, th - e, &c).unwrap().0) / (2.0 * e);
        assert!(((fd - dt) / dt).abs() < 1e-6);
    }

    #[test]
    fn exner_rejects_nonpositive() {
        let c = PhysicalConstants::standard();
        assert!(exner(0.0, 300.0, &c).is_err());
        assert!(exner(1.0, -1.0, &c).is_err());
    }

    #[test]
    fn damping_profile() {
        let d = Damping {
            z_b: 2e4,
            top: 3e4,
            mu_bar: 0.1,
        };
        assert_eq!(d.mu(1e4), 0.0);
        assert_eq!(d.mu(2e4), 0.0);
        assert!((d.mu(3e4) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rho_inverts_exner() {
        let c = PhysicalConstants::standard();
        let rho = rho_from_exner(0.93, 305.0, &c);
        assert!((exner(rho, 305.0, &c).unwrap().0 - 0.93).abs() < 1e-14);
    }
}
