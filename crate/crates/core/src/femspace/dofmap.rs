//! Global degree-of-freedom numbering.
//!
//! Numbering is column-major so each vertical column owns a contiguous range:
//!
//! * velocity: column `i` starts at `i * (8 nlayers + 2)`; layer `k` contributes
//!   the two normal moments of the vertical facet on line `i`, the two of the
//!   horizontal facet below it, then two horizontal and two vertical interior
//!   moments. The top boundary facet of the column comes last.
//! * temperature: column `i` starts at `i * 2 (2 nlayers + 1)`; vertical node
//!   level `kk` (two per layer plus the top) holds the left and right nodes.
//! * density and out-of-plane velocity: `cell * 4 + local`.
//!
//! All orientation signs are +1: vertical facet dofs measure flux in +x and
//! horizontal facet dofs flux in +z, which is the direction from the lower to the
//! higher cell index (from column `ncols - 1` to column 0 across the seam).

use crate::femspace::basis::SpaceTag;
use crate::mesh::ExtrudedMesh;

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub tag: SpaceTag,
    ncols: usize,
    nlayers: usize,
    ndofs: usize,
    cell_dofs: Vec<usize>,
    num_global: usize,
    constrained: Vec<bool>,
}

impl DofMap {
    pub fn new(tag: SpaceTag, mesh: &ExtrudedMesh) -> Self {
        let (nc, nl) = (mesh.ncols(), mesh.nlayers());
        let ndofs = tag.num_dofs_per_cell();
        let mut cell_dofs = Vec::with_capacity(nc * nl * ndofs);
        let num_global;
        let mut constrained;
        match tag {
            SpaceTag::VelocityRt1 => {
                let per_col = 8 * nl + 2;
                num_global = nc * per_col;
                let vfacet = |i: usize, k: usize| i * per_col + 8 * k;
                let hfacet = |i: usize, k: usize| {
                    if k == nl {
                        i * per_col + 8 * nl
                    } else {
                        i * per_col + 8 * k + 2
                    }
                };
                for i in 0..nc {
                    for k in 0..nl {
                        let base = i * per_col + 8 * k;
                        let l = vfacet(i, k);
                        let r = vfacet((i + 1) % nc, k);
                        let b = hfacet(i, k);
                        let t = hfacet(i, k + 1);
                        cell_dofs.extend_from_slice(&[
                            l,
                            l + 1,
                            r,
                            r + 1,
                            b,
                            b + 1,
                            t,
                            t + 1,
                            base + 4,
                            base + 5,
                            base + 6,
                            base + 7,
                        ]);
                    }
                }
                constrained = vec![false; num_global];
                for i in 0..nc {
                    for k in [0, nl] {
                        let d = hfacet(i, k);
                        constrained[d] = true;
                        constrained[d + 1] = true;
                    }
                }
            }
            SpaceTag::ThetaSpace => {
                let per_col = 2 * (2 * nl + 1);
                num_global = nc * per_col;
                for i in 0..nc {
                    for k in 0..nl {
                        for v in 0..3 {
                            for h in 0..2 {
                                cell_dofs.push(i * per_col + (2 * k + v) * 2 + h);
                            }
                        }
                    }
                }
                constrained = vec![false; num_global];
            }
            SpaceTag::DensityDgq1 | SpaceTag::YVelocityDgq1 => {
                num_global = nc * nl * 4;
                cell_dofs.extend(0..num_global);
                constrained = vec![false; num_global];
            }
        }
        constrained.shrink_to_fit();
        DofMap {
            tag,
            ncols: nc,
            nlayers: nl,
            ndofs,
            cell_dofs,
            num_global,
            constrained,
        }
    }

    pub fn num_global(&self) -> usize {
        self.num_global
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.ndofs
    }

    pub fn num_cells(&self) -> usize {
        self.ncols * self.nlayers
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nlayers(&self) -> usize {
        self.nlayers
    }

    /// Global indices of the local dofs of `cell`.
    #[inline]
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell * self.ndofs..(cell + 1) * self.ndofs]
    }

    /// Orientation sign of local dof `local` on `cell`.
    #[inline]
    pub fn sign(&self, _cell: usize, _local: usize) -> f64 {
        1.0
    }

    #[inline]
    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained(&self) -> impl Iterator<Item = usize> + '_ {
        self.constrained.iter().enumerate().filter(|(_, c)| **c).map(|(i, _)| i)
    }

    pub fn num_constrained(&self) -> usize {
        self.constrained.iter().filter(|c| **c).count()
    }

    /// Contiguous dof range owned by column `column` (velocity and temperature),
    /// or by the cells of that column (DG spaces).
    pub fn column_range(&self, column: usize) -> std::ops::Range<usize> {
        let per_col = self.num_global / self.ncols;
        column * per_col..(column + 1) * per_col
    }
}
