//! Coefficient vectors of discrete fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::femspace::basis::SpaceTag;
use crate::femspace::dofmap::DofMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub tag: SpaceTag,
    pub coefficients: Vec<f64>,
}

impl Field {
    pub fn zeros(dofmap: &DofMap) -> Self {
        Field {
            tag: dofmap.tag,
            coefficients: vec![0.0; dofmap.num_global()],
        }
    }

    pub fn from_coefficients(dofmap: &DofMap, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != dofmap.num_global() {
            return Err(Error::Dimension {
                expected: dofmap.num_global(),
                got: coefficients.len(),
            });
        }
        Ok(Field {
            tag: dofmap.tag,
            coefficients,
        })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Gather the local coefficients of `cell`.
    pub fn local(&self, dofmap: &DofMap, cell: usize, out: &mut [f64]) {
        for (o, &g) in out.iter_mut().zip(dofmap.cell_dofs(cell)) {
            *o = self.coefficients[g];
        }
    }
}
