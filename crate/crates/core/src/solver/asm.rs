//! Additive Schwarz preconditioner over vertical column patches.
//!
//! Patch `i` is the star of vertex line `i` extruded through the column: all
//! dofs of the cells in columns `i - 1` and `i` (mod `ncols`) except those on
//! the vertical facets of lines `i - 1` and `i + 1`, which bound the patch, and
//! except constrained dofs. Each patch submatrix is reordered with RCM and
//! factored as a banded LU, with the factors kept in single precision: the
//! preconditioner apply is bound by memory traffic, and the rounding does not
//! change the GMRES iteration counts.

use rayon::prelude::*;

use crate::error::Result;
use crate::forms::state::Spaces;
use crate::mesh::LOCAL_LEFT;
use crate::solver::banded::{BandedLu, BandedMatrix};
use crate::solver::csr::CsrMatrix;
use crate::solver::gmres::Preconditioner;
use crate::solver::rcm::rcm_ordering;

#[derive(Debug, Clone)]
pub struct ColumnPatch {
    pub vertex_column: usize,
    /// Sorted global dof indices.
    pub dof_indices: Vec<usize>,
    /// RCM permutation, `perm[new] = local`.
    perm: Vec<usize>,
    /// Inverse of `perm`.
    inv: Vec<usize>,
    kl: usize,
    ku: usize,
    factors: Option<BandedLu<f32>>,
}

impl ColumnPatch {
    pub fn len(&self) -> usize {
        self.dof_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dof_indices.is_empty()
    }

    /// Lower and upper bandwidth after reordering.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }
}

/// Dof lists of the column patches (structure only).
pub fn patch_dofs(spaces: &Spaces) -> Vec<(usize, Vec<usize>)> {
    let mesh = &spaces.mesh;
    let (nc, nl) = (mesh.ncols(), mesh.nlayers());
    let constrained = spaces.constrained_mask();
    let mut out = Vec::with_capacity(nc);
    let mut cell_dofs = Vec::new();
    for i in 0..nc {
        let left = (i + nc - 1) % nc;
        let right = (i + 1) % nc;
        let mut excluded = Vec::new();
        for k in 0..nl {
            for line in [left, right] {
                let d = spaces.velocity.cell_dofs(mesh.cell_index(line, k));
                excluded.push(d[2 * LOCAL_LEFT]);
                excluded.push(d[2 * LOCAL_LEFT + 1]);
            }
        }
        excluded.sort_unstable();
        let mut dofs = Vec::new();
        for col in [left, i] {
            for k in 0..nl {
                spaces.cell_global_dofs(mesh.cell_index(col, k), &mut cell_dofs);
                dofs.extend(
                    cell_dofs
                        .iter()
                        .copied()
                        .filter(|d| !constrained[*d] && excluded.binary_search(d).is_err()),
                );
            }
        }
        dofs.sort_unstable();
        dofs.dedup();
        out.push((i, dofs));
    }
    out
}

/// Build the patches and their RCM orderings from the Jacobian sparsity pattern.
pub fn build_patches(spaces: &Spaces, pattern: &CsrMatrix) -> Vec<ColumnPatch> {
    patch_dofs(spaces)
        .into_par_iter()
        .map(|(col, dofs)| make_patch(col, dofs, pattern))
        .collect()
}

/// Patch on an arbitrary sorted dof set.
pub fn make_patch(vertex_column: usize, dof_indices: Vec<usize>, pattern: &CsrMatrix) -> ColumnPatch {
    let n = dof_indices.len();
    let mut adj = vec![Vec::new(); n];
    for (li, &gi) in dof_indices.iter().enumerate() {
        let (cols, _) = pattern.row(gi);
        for c in cols {
            if let Ok(lj) = dof_indices.binary_search(c) {
                if lj != li {
                    adj[li].push(lj);
                    adj[lj].push(li);
                }
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let perm = rcm_ordering(&adj);
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let (mut kl, mut ku) = (0, 0);
    for (i, a) in adj.iter().enumerate() {
        for &j in a {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
    }
    ColumnPatch {
        vertex_column,
        dof_indices,
        perm,
        inv,
        kl,
        ku,
        factors: None,
    }
}

/// Additive Schwarz preconditioner `sum_p R_p^T A_p^{-1} R_p`, with identity on
/// dofs outside every patch.
#[derive(Debug, Clone)]
pub struct AsmPreconditioner {
    n: usize,
    patches: Vec<ColumnPatch>,
    uncovered: Vec<usize>,
}

impl AsmPreconditioner {
    pub fn new(n: usize, patches: Vec<ColumnPatch>) -> Self {
        let mut covered = vec![false; n];
        for p in &patches {
            for &d in &p.dof_indices {
                covered[d] = true;
            }
        }
        let uncovered = (0..n).filter(|d| !covered[*d]).collect();
        AsmPreconditioner { n, patches, uncovered }
    }

    pub fn patches(&self) -> &[ColumnPatch] {
        &self.patches
    }

    /// Dofs not covered by any patch (passed through unchanged).
    pub fn uncovered(&self) -> &[usize] {
        &self.uncovered
    }

    /// Factor every patch submatrix of `a`.
    pub fn factor(&mut self, a: &CsrMatrix) -> Result<()> {
        self.patches.par_iter_mut().try_for_each(|p| -> Result<()> {
            let n = p.dof_indices.len();
            let mut band = BandedMatrix::zeros(n, p.kl, p.ku);
            for (li, &gi) in p.dof_indices.iter().enumerate() {
                let (cols, vals) = a.row(gi);
                let pi = p.inv[li];
                for (c, v) in cols.iter().zip(vals) {
                    if let Ok(lj) = p.dof_indices.binary_search(c) {
                        band.set(pi, p.inv[lj], *v);
                    }
                }
            }
            p.factors = Some(band.factor_single(p.vertex_column)?);
            Ok(())
        })
    }
}

impl Preconditioner for AsmPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        assert_eq!(r.len(), self.n);
        let local: Vec<Vec<f64>> = self
            .patches
            .par_iter()
            .map(|p| {
                let lu = p.factors.as_ref().expect("patch not factored");
                let mut b: Vec<f64> = p.perm.iter().map(|&l| r[p.dof_indices[l]]).collect();
                lu.solve(&mut b);
                b
            })
            .collect();
        z.iter_mut().for_each(|v| *v = 0.0);
        for (p, b) in self.patches.iter().zip(&local) {
            for (new, &l) in p.perm.iter().enumerate() {
                z[p.dof_indices[l]] += b[new];
            }
        }
        for &d in &self.uncovered {
            z[d] = r[d];
        }
    }
}
