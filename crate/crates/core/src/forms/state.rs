//! The discrete spaces of a run and the coupled prognostic state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::femspace::{DofMap, Field, SpaceTag};
use crate::mesh::ExtrudedMesh;

/// Mesh plus the dof maps of every prognostic field, with the layout of the
/// monolithic vector `(u | u_y | rho | theta)`.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub mesh: ExtrudedMesh,
    pub velocity: DofMap,
    pub y_velocity: Option<DofMap>,
    pub density: DofMap,
    pub theta: DofMap,
}

impl Spaces {
    pub fn new(mesh: ExtrudedMesh, with_y_velocity: bool) -> Self {
        let velocity = DofMap::new(SpaceTag::VelocityRt1, &mesh);
        let y_velocity = with_y_velocity.then(|| DofMap::new(SpaceTag::YVelocityDgq1, &mesh));
        let density = DofMap::new(SpaceTag::DensityDgq1, &mesh);
        let theta = DofMap::new(SpaceTag::ThetaSpace, &mesh);
        Spaces {
            mesh,
            velocity,
            y_velocity,
            density,
            theta,
        }
    }

    pub fn has_y_velocity(&self) -> bool {
        self.y_velocity.is_some()
    }

    pub fn offset_u(&self) -> usize {
        0
    }
    pub fn offset_uy(&self) -> usize {
        self.velocity.num_global()
    }
    pub fn offset_rho(&self) -> usize {
        self.offset_uy() + self.y_velocity.as_ref().map_or(0, |d| d.num_global())
    }
    pub fn offset_theta(&self) -> usize {
        self.offset_rho() + self.density.num_global()
    }
    pub fn num_dofs(&self) -> usize {
        self.offset_theta() + self.theta.num_global()
    }

    /// Number of local dofs of one cell across all fields.
    pub fn local_size(&self) -> usize {
        12 + if self.has_y_velocity() { 4 } else { 0 } + 4 + 6
    }

    /// Monolithic global indices of the local dofs of `cell`, ordered
    /// velocity, out-of-plane velocity, density, temperature.
    pub fn cell_global_dofs(&self, cell: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(self.velocity.cell_dofs(cell));
        if let Some(d) = &self.y_velocity {
            let o = self.offset_uy();
            out.extend(d.cell_dofs(cell).iter().map(|g| g + o));
        }
        let o = self.offset_rho();
        out.extend(self.density.cell_dofs(cell).iter().map(|g| g + o));
        let o = self.offset_theta();
        out.extend(self.theta.cell_dofs(cell).iter().map(|g| g + o));
    }

    /// Monolithic indices of the constrained velocity dofs.
    pub fn constrained(&self) -> Vec<usize> {
        self.velocity.constrained().collect()
    }

    pub fn constrained_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.num_dofs()];
        for d in self.velocity.constrained() {
            m[d] = true;
        }
        m
    }
}

/// Prognostic fields `(u, u_y, rho, theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: Field,
    pub u_y: Option<Field>,
    pub rho: Field,
    pub theta: Field,
}

impl State {
    pub fn zeros(spaces: &Spaces) -> Self {
        State {
            u: Field::zeros(&spaces.velocity),
            u_y: spaces.y_velocity.as_ref().map(Field::zeros),
            rho: Field::zeros(&spaces.density),
            theta: Field::zeros(&spaces.theta),
        }
    }

    /// Concatenate into the monolithic vector.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(
            self.u.len() + self.u_y.as_ref().map_or(0, |f| f.len()) + self.rho.len() + self.theta.len(),
        );
        v.extend_from_slice(&self.u.coefficients);
        if let Some(f) = &self.u_y {
            v.extend_from_slice(&f.coefficients);
        }
        v.extend_from_slice(&self.rho.coefficients);
        v.extend_from_slice(&self.theta.coefficients);
        v
    }

    pub fn from_vector(spaces: &Spaces, v: &[f64]) -> Result<Self> {
        if v.len() != spaces.num_dofs() {
            return Err(Error::Dimension {
                expected: spaces.num_dofs(),
                got: v.len(),
            });
        }
        let u = Field::from_coefficients(&spaces.velocity, v[..spaces.offset_uy()].to_vec())?;
        let u_y = match &spaces.y_velocity {
            Some(d) => Some(Field::from_coefficients(
                d,
                v[spaces.offset_uy()..spaces.offset_rho()].to_vec(),
            )?),
            None => None,
        };
        let rho = Field::from_coefficients(&spaces.density, v[spaces.offset_rho()..spaces.offset_theta()].to_vec())?;
        let theta = Field::from_coefficients(&spaces.theta, v[spaces.offset_theta()..].to_vec())?;
        Ok(State { u, u_y, rho, theta })
    }

    pub fn check(&self, spaces: &Spaces) -> Result<()> {
        let want = [
            (self.u.len(), spaces.velocity.num_global()),
            (self.rho.len(), spaces.density.num_global()),
            (self.theta.len(), spaces.theta.num_global()),
        ];
        for (got, expected) in want {
            if got != expected {
                return Err(Error::Dimension { expected, got });
            }
        }
        match (&self.u_y, &spaces.y_velocity) {
            (Some(f), Some(d)) if f.len() == d.num_global() => Ok(()),
            (None, None) => Ok(()),
            _ => Err(Error::InvalidArgument(
                "out-of-plane velocity does not match the spaces".into(),
            )),
        }
    }
}
