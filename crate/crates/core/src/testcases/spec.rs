use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::constants::PhysicalConstants;

/// The six benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseName {
    GwNh,
    GwH,
    Straka,
    MtnNh,
    MtnH,
    Schar,
}

impl CaseName {
    pub const ALL: [CaseName; 6] = [
        CaseName::GwNh,
        CaseName::GwH,
        CaseName::Straka,
        CaseName::MtnNh,
        CaseName::MtnH,
        CaseName::Schar,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseName::GwNh => "gw_nh",
            CaseName::GwH => "gw_h",
            CaseName::Straka => "straka",
            CaseName::MtnNh => "mtn_nh",
            CaseName::MtnH => "mtn_h",
            CaseName::Schar => "schar",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            CaseName::GwNh => "nonhydrostatic gravity wave",
            CaseName::GwH => "hydrostatic gravity wave (rotating, 3D velocity)",
            CaseName::Straka => "density current",
            CaseName::MtnNh => "nonhydrostatic flow over an Agnesi mountain",
            CaseName::MtnH => "hydrostatic flow over an Agnesi mountain (rotating)",
            CaseName::Schar => "Schaer mountain range",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseName::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown testcase '{s}'")))
    }
}

/// Background potential temperature profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stratification {
    /// Constant `theta0`.
    Isentropic { theta0: f64 },
    /// `t_surf exp(N² z / g)`.
    Stratified { t_surf: f64 },
    /// Constant temperature: `t_surf exp(g z / (t_surf c_p))`.
    Isothermal { t_surf: f64 },
}

impl Stratification {
    pub fn theta(&self, z: f64, c: &PhysicalConstants) -> f64 {
        match *self {
            Stratification::Isentropic { theta0 } => theta0,
            Stratification::Stratified { t_surf } => t_surf * (c.n * c.n * z / c.g).exp(),
            Stratification::Isothermal { t_surf } => t_surf * (c.g * z / (t_surf * c.cp)).exp(),
        }
    }
}

/// Initial potential-temperature perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    None,
    /// `dtheta0 sin(pi z / H) / (1 + x²/a²)`.
    GravityWave { dtheta0: f64, a: f64 },
    /// Cold bubble with temperature anomaly `amplitude (cos(pi L_r) + 1) / 2`.
    ColdBubble {
        amplitude: f64,
        x_c: f64,
        x_r: f64,
        z_c: f64,
        z_r: f64,
    },
}

impl Perturbation {
    /// Gravity-wave potential temperature anomaly; zero for other kinds.
    pub fn delta_theta(&self, x: f64, z: f64, height: f64) -> f64 {
        match *self {
            Perturbation::GravityWave { dtheta0, a } => dtheta0 * (PI * z / height).sin() / (1.0 + x * x / (a * a)),
            _ => 0.0,
        }
    }

    /// Cold-bubble temperature anomaly; zero for other kinds.
    pub fn delta_t(&self, x: f64, z: f64) -> f64 {
        match *self {
            Perturbation::ColdBubble {
                amplitude,
                x_c,
                x_r,
                z_c,
                z_r,
            } => {
                let lr = (((x - x_c) / x_r).powi(2) + ((z - z_c) / z_r).powi(2)).sqrt();
                if lr > 1.0 {
                    0.0
                } else {
                    amplitude * ((PI * lr).cos() + 1.0) / 2.0
                }
            }
            _ => 0.0,
        }
    }
}

/// Bottom orography `z_s(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Orography {
    Flat,
    /// `h a² / (x² + a²)`.
    Agnesi { a: f64, h: f64 },
    /// `h_m exp(-(x/a)²) cos²(pi x / lambda)`.
    Schar { h_m: f64, lambda: f64, a: f64 },
}

impl Orography {
    pub fn height(&self, x: f64) -> f64 {
        match *self {
            Orography::Flat => 0.0,
            Orography::Agnesi { a, h } => h * a * a / (x * x + a * a),
            Orography::Schar { h_m, lambda, a } => {
                let c = (PI * x / lambda).cos();
                h_m * (-(x / a).powi(2)).exp() * c * c
            }
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Orography::Flat)
    }
}

/// Sponge layer: `mu_bar = mu_bar_dt / dt` at the top, zero below `z_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Absorbing {
    pub z_b: f64,
    pub mu_bar_dt: f64,
}

/// Density perturbation rule for the cold bubble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BubbleDensity {
    /// `rho_b theta_b / theta_0`, keeping `rho theta` unchanged.
    #[default]
    ConstantPressure,
    /// `rho_b theta_0 / theta_b`, as literally written in the two-step recipe.
    Literal,
}

/// Complete description of one benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestcaseSpec {
    pub name: CaseName,
    pub lx: f64,
    pub height: f64,
    pub ncols: usize,
    pub nlayers: usize,
    pub dt: f64,
    pub t_end: f64,
    pub constants: PhysicalConstants,
    pub initial_wind: f64,
    pub stratification: Stratification,
    pub perturbation: Perturbation,
    pub orography: Orography,
    pub absorbing: Option<Absorbing>,
    pub nu: f64,
    pub theta_diffusivity: f64,
    /// Out-of-plane velocity is carried (rotating cases).
    pub y_velocity: bool,
    /// Constant momentum forcing per unit mass.
    pub balance_forcing: [f64; 3],
    #[serde(default)]
    pub bubble_density: BubbleDensity,
}

impl TestcaseSpec {
    /// Default configuration of a named case.
    pub fn new(name: CaseName) -> Self {
        let standard = PhysicalConstants::standard();
        let nonrotating = standard.with_coriolis(0.0);
        let base = TestcaseSpec {
            name,
            lx: 3.0e5,
            height: 1.0e4,
            ncols: 150,
            nlayers: 5,
            dt: 12.0,
            t_end: 3000.0,
            constants: nonrotating,
            initial_wind: 20.0,
            stratification: Stratification::Stratified { t_surf: 300.0 },
            perturbation: Perturbation::GravityWave { dtheta0: 1e-2, a: 5e3 },
            orography: Orography::Flat,
            absorbing: None,
            nu: 0.0,
            theta_diffusivity: 0.0,
            y_velocity: false,
            balance_forcing: [0.0; 3],
            bubble_density: BubbleDensity::ConstantPressure,
        };
        match name {
            CaseName::GwNh => base,
            CaseName::GwH => TestcaseSpec {
                lx: 6.0e6,
                ncols: 300,
                nlayers: 10,
                dt: 100.0,
                t_end: 60000.0,
                constants: standard,
                perturbation: Perturbation::GravityWave { dtheta0: 1e-2, a: 1e5 },
                y_velocity: true,
                balance_forcing: [0.0, -20.0 * standard.f, 0.0],
                ..base
            },
            CaseName::Straka => TestcaseSpec {
                lx: 51200.0,
                height: 6400.0,
                ncols: 64,
                nlayers: 8,
                dt: 4.0,
                t_end: 900.0,
                constants: nonrotating,
                initial_wind: 0.0,
                stratification: Stratification::Isentropic { theta0: 300.0 },
                perturbation: Perturbation::ColdBubble {
                    amplitude: -15.0,
                    x_c: 0.0,
                    x_r: 4000.0,
                    z_c: 3000.0,
                    z_r: 2000.0,
                },
                nu: 75.0,
                theta_diffusivity: 75.0,
                ..base
            },
            CaseName::MtnNh => TestcaseSpec {
                lx: 144000.0,
                height: 35000.0,
                ncols: 180,
                nlayers: 70,
                dt: 5.0,
                t_end: 9000.0,
                initial_wind: 10.0,
                perturbation: Perturbation::None,
                orography: Orography::Agnesi { a: 1e4, h: 1.0 },
                absorbing: Some(Absorbing {
                    z_b: 2.5e4,
                    mu_bar_dt: 0.15,
                }),
                ..base
            },
            CaseName::MtnH => TestcaseSpec {
                lx: 240000.0,
                height: 50000.0,
                ncols: 100,
                nlayers: 60,
                dt: 20.0,
                t_end: 15000.0,
                constants: standard,
                initial_wind: 20.0,
                stratification: Stratification::Isothermal { t_surf: 250.0 },
                perturbation: Perturbation::None,
                orography: Orography::Agnesi { a: 1e3, h: 1.0 },
                absorbing: Some(Absorbing {
                    z_b: 3.0e4,
                    mu_bar_dt: 0.3,
                }),
                y_velocity: true,
                balance_forcing: [0.0, -20.0 * standard.f, 0.0],
                ..base
            },
            CaseName::Schar => TestcaseSpec {
                lx: 1.0e5,
                height: 3.0e4,
                ncols: 100,
                nlayers: 50,
                dt: 8.0,
                t_end: 18000.0,
                initial_wind: 10.0,
                perturbation: Perturbation::None,
                orography: Orography::Schar {
                    h_m: 250.0,
                    lambda: 4e3,
                    a: 5e3,
                },
                absorbing: Some(Absorbing {
                    z_b: 2.0e4,
                    mu_bar_dt: 1.2,
                }),
                ..base
            },
        }
    }

    /// Density current with square cells of width `dx` and `dt = 4 s * dx / 800 m`.
    pub fn straka(dx: f64) -> Result<Self> {
        let mut s = TestcaseSpec::new(CaseName::Straka);
        let nc = s.lx / dx;
        let nl = s.height / dx;
        if (nc - nc.round()).abs() > 1e-9 || (nl - nl.round()).abs() > 1e-9 || nl < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "dx = {dx} does not divide the density-current domain"
            )));
        }
        s.ncols = nc.round() as usize;
        s.nlayers = nl.round() as usize;
        s.dt = 4.0 * dx / 800.0;
        Ok(s)
    }

    pub fn x_min(&self) -> f64 {
        -0.5 * self.lx
    }

    /// Number of steps to reach `t_end`.
    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Damping amplitude `mu_bar` for the configured time step.
    pub fn mu_bar(&self) -> Option<f64> {
        self.absorbing.map(|a| a.mu_bar_dt / self.dt)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.lx > 0.0 && self.height > 0.0) {
            return bad("domain size must be positive".into());
        }
        if self.ncols < 2 || self.nlayers < 1 {
            return bad(format!(
                "need at least 2 columns and 1 layer, got {}x{}",
                self.ncols, self.nlayers
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0) {
            return bad(format!("end time must be non-negative, got {}", self.t_end));
        }
        if self.nu < 0.0 || self.theta_diffusivity < 0.0 {
            return bad("viscosity must be non-negative".into());
        }
        if let Some(a) = self.absorbing {
            if !(a.z_b < self.height && a.mu_bar_dt >= 0.0) {
                return bad("absorbing layer must start below the lid".into());
            }
        }
        if self.balance_forcing[1] != 0.0 && !self.y_velocity {
            return bad("out-of-plane forcing needs the out-of-plane velocity".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in CaseName::ALL {
            assert_eq!(c.as_str().parse::<CaseName>().unwrap(), c);
        }
        assert!("gw".parse::<CaseName>().is_err());
    }

    #[test]
    fn straka_resolutions() {
        let s = TestcaseSpec::straka(400.0).unwrap();
        assert_eq!((s.ncols, s.nlayers, s.dt), (128, 16, 2.0));
        assert!(TestcaseSpec::straka(300.0).is_err());
    }

    #[test]
    fn step_counts() {
        assert_eq!(TestcaseSpec::new(CaseName::GwNh).num_steps(), 250);
        assert_eq!(TestcaseSpec::new(CaseName::Straka).num_steps(), 225);
    }
}
