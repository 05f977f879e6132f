use crate::balance::{self, BoundarySide};
use crate::error::Result;
use crate::femspace::eval::scalar_at;
use crate::femspace::project::{project_scalar, project_scalar_with, project_velocity};
use crate::femspace::Field;
use crate::forms::constants::{exner, Damping, ModelParams};
use crate::forms::state::{Spaces, State};
use crate::mesh::ExtrudedMesh;

use super::spec::{BubbleDensity, Perturbation, TestcaseSpec};

/// Everything needed to start a run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub spec: TestcaseSpec,
    pub spaces: Spaces,
    pub state: State,
    pub params: ModelParams,
    pub theta_b: Field,
    pub rho_b: Field,
    /// Largest Newton iteration count of the column balance solves.
    pub balance_newton_its: usize,
    /// Top Exner value used over orography.
    pub pi_top: Option<f64>,
}

impl TestcaseSpec {
    pub fn build_mesh(&self) -> Result<ExtrudedMesh> {
        let flat = ExtrudedMesh::new(self.ncols, self.nlayers, self.lx, self.height, self.x_min())?;
        if self.orography.is_flat() {
            Ok(flat)
        } else {
            let oro = self.orography;
            flat.apply_terrain(move |x| oro.height(x))
        }
    }

    pub fn model_params(&self) -> ModelParams {
        let mut p = ModelParams::new(self.constants);
        p.nu = self.nu;
        p.theta_diffusivity = self.theta_diffusivity;
        p.balance_forcing = self.balance_forcing;
        p.damping = self.absorbing.map(|a| Damping {
            z_b: a.z_b,
            top: self.height,
            mu_bar: a.mu_bar_dt / self.dt,
        });
        p
    }

    /// Build the mesh and the balanced, perturbed initial state.
    pub fn initialize(&self) -> Result<Setup> {
        self.validate()?;
        let params = self.model_params();
        params.validate()?;
        let c = self.constants;
        let spaces = Spaces::new(self.build_mesh()?, self.y_velocity);
        let deg = params.quad_degree;
        let strat = self.stratification;
        let theta_b = project_scalar(|_, z| strat.theta(z, &c), &spaces.theta, &spaces.mesh, deg)?;

        let (bal, pi_top) = if self.orography.is_flat() {
            (
                balance::balance_rho_newton(&spaces, &theta_b, 1.0, BoundarySide::Bottom, c)?,
                None,
            )
        } else {
            let col = balance::reference_column(&spaces);
            let top = balance::find_top_pi(&spaces, &theta_b, 1.0, col, c)?;
            (
                balance::balance_rho_newton(&spaces, &theta_b, top, BoundarySide::Top, c)?,
                Some(top),
            )
        };
        let rho_b = bal.rho;

        let h = self.height;
        let pert = self.perturbation;
        let (theta, rho) = match pert {
            Perturbation::None => (theta_b.clone(), rho_b.clone()),
            Perturbation::GravityWave { .. } => {
                let d = project_scalar(|x, z| pert.delta_theta(x, z, h), &spaces.theta, &spaces.mesh, deg)?;
                let mut th = theta_b.clone();
                for (a, b) in th.coefficients.iter_mut().zip(&d.coefficients) {
                    *a += b;
                }
                (th, rho_b.clone())
            }
            Perturbation::ColdBubble { .. } => {
                let mesh = &spaces.mesh;
                let bg = |cell: usize, xi: [f64; 2]| -> (f64, f64) {
                    let g = mesh.corners(cell).geometry(xi);
                    let th = scalar_at(&theta_b, &spaces.theta, &g, cell, xi).0;
                    let r = scalar_at(&rho_b, &spaces.density, &g, cell, xi).0;
                    (r, th)
                };
                let theta0 = project_scalar_with(
                    |cell, xi, x| {
                        let (r, th) = bg(cell, xi);
                        // Background state is positive by construction of the balance.
                        let pi = exner(r, th, &c).map(|e| e.0).unwrap_or(1.0);
                        th + pert.delta_t(x[0], x[1]) / pi
                    },
                    &spaces.theta,
                    mesh,
                    deg,
                )?;
                let variant = self.bubble_density;
                let rho0 = project_scalar_with(
                    |cell, xi, _| {
                        let (r, th) = bg(cell, xi);
                        let g = mesh.corners(cell).geometry(xi);
                        let th0 = scalar_at(&theta0, &spaces.theta, &g, cell, xi).0;
                        match variant {
                            BubbleDensity::ConstantPressure => r * th / th0,
                            BubbleDensity::Literal => r * th0 / th,
                        }
                    },
                    &spaces.density,
                    mesh,
                    deg,
                )?;
                (theta0, rho0)
            }
        };

        let u0 = self.initial_wind;
        // The wind is projected into the subspace with zero normal flow at the
        // lower and upper boundaries; over orography this removes the
        // incompatible normal component.
        let u = project_velocity(|_, _| [u0, 0.0], &spaces.velocity, &spaces.mesh, deg, true)?;
        let u_y = spaces.y_velocity.as_ref().map(Field::zeros);
        let state = State { u, u_y, rho, theta };
        Ok(Setup {
            spec: self.clone(),
            spaces,
            state,
            params,
            theta_b,
            rho_b,
            balance_newton_its: bal.max_newton_its,
            pi_top,
        })
    }
}

/// Value of a scalar field at the nodes of its own space, cell by cell.
pub fn nodal_values(field: &Field, spaces: &Spaces, cell: usize) -> Vec<f64> {
    let dm = match field.tag {
        crate::femspace::SpaceTag::ThetaSpace => &spaces.theta,
        _ => &spaces.density,
    };
    dm.cell_dofs(cell).iter().map(|&d| field.coefficients[d]).collect()
}

