//! Structured extruded quadrilateral meshes for a periodic vertical slice.
//!
//! Cells are numbered column-major (`cell = column * nlayers + layer`). Vertex
//! line `i` is the left edge of column `i`; the right edge of column `ncols - 1`
//! is identified with line 0. Terrain deformation moves vertices vertically
//! only, so every column keeps vertical side walls.
//!
//! All geometry is expressed through the bilinear map from the reference
//! square `[-1, 1]^2`.

use crate::error::{Error, Result};

/// Kind of a facet in the extruded mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FacetKind {
    InteriorVertical,
    InteriorHorizontal,
    BoundaryBottom,
    BoundaryTop,
}

/// Reference facet numbering: 0 = left (xi = -1), 1 = right (xi = +1),
/// 2 = bottom (zeta = -1), 3 = top (zeta = +1).
pub const LOCAL_LEFT: usize = 0;
pub const LOCAL_RIGHT: usize = 1;
pub const LOCAL_BOTTOM: usize = 2;
pub const LOCAL_TOP: usize = 3;

/// A facet together with its adjacent cells.
///
/// For interior facets the plus side is the left (vertical facets, including the
/// periodic seam) or lower (horizontal facets) cell and `normal` points from
/// plus into minus. Boundary facets only have a plus cell and carry the outward
/// normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetRef {
    pub kind: FacetKind,
    pub plus_cell: usize,
    pub minus_cell: Option<usize>,
    pub local_facet_ids: [usize; 2],
    pub normal: [f64; 2],
    pub area: f64,
}

impl FacetRef {
    pub fn is_interior(&self) -> bool {
        matches!(
            self.kind,
            FacetKind::InteriorVertical | FacetKind::InteriorHorizontal
        )
    }
}

/// Jacobian data of the reference-to-physical map at one reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    /// `jacobian[i][j] = d x_i / d xi_j` with `x = (x, z)` and `xi = (xi, zeta)`.
    pub jacobian: [[f64; 2]; 2],
    pub det_jacobian: f64,
    pub inverse_jacobian: [[f64; 2]; 2],
    /// Reference derivatives of the Jacobian: `djacobian[k][i][j] = d J_ij / d xi_k`.
    pub djacobian: [[[f64; 2]; 2]; 2],
    /// Reference gradient of `det_jacobian`.
    pub ddet: [f64; 2],
    /// Physical location of the reference point.
    pub point: [f64; 2],
}

/// Corner coordinates of one cell: bottom-left, bottom-right, top-left, top-right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCorners(pub [[f64; 2]; 4]);

impl CellCorners {
    /// Evaluate the bilinear map and its derivatives at a reference point.
    pub fn geometry(&self, xi: [f64; 2]) -> CellGeometry {
        let [bl, br, tl, tr] = self.0;
        let (s, t) = (xi[0], xi[1]);
        let n = [
            0.25 * (1.0 - s) * (1.0 - t),
            0.25 * (1.0 + s) * (1.0 - t),
            0.25 * (1.0 - s) * (1.0 + t),
            0.25 * (1.0 + s) * (1.0 + t),
        ];
        let corners = [bl, br, tl, tr];
        let mut point = [0.0; 2];
        for (c, w) in corners.iter().zip(n) {
            point[0] += w * c[0];
            point[1] += w * c[1];
        }
        let mut jac = [[0.0; 2]; 2];
        let mut cross = [0.0; 2];
        for i in 0..2 {
            jac[i][0] = 0.25 * ((br[i] - bl[i]) * (1.0 - t) + (tr[i] - tl[i]) * (1.0 + t));
            jac[i][1] = 0.25 * ((tl[i] - bl[i]) * (1.0 - s) + (tr[i] - br[i]) * (1.0 + s));
            cross[i] = 0.25 * (bl[i] - br[i] - tl[i] + tr[i]);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        // d J / d xi: only column 1 changes (mixed derivative); d J / d zeta: column 0.
        let mut djac = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            djac[0][i][1] = cross[i];
            djac[1][i][0] = cross[i];
        }
        let mut ddet = [0.0; 2];
        for k in 0..2 {
            let d = &djac[k];
            ddet[k] = d[0][0] * jac[1][1] + jac[0][0] * d[1][1] - d[0][1] * jac[1][0] - jac[0][1] * d[1][0];
        }
        CellGeometry {
            jacobian: jac,
            det_jacobian: det,
            inverse_jacobian: inv,
            djacobian: djac,
            ddet,
            point,
        }
    }

    /// Exact cell area (the Jacobian determinant is bilinear).
    pub fn area(&self) -> f64 {
        4.0 * self.geometry([0.0, 0.0]).det_jacobian
    }
}

/// Columns-by-layers quadrilateral mesh, periodic in x.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrudedMesh {
    ncols: usize,
    nlayers: usize,
    lx: f64,
    height: f64,
    x_offset: f64,
    /// Vertex heights, `z[line * (nlayers + 1) + level]` for `line < ncols`.
    z: Vec<f64>,
    facets: Vec<FacetRef>,
    cell_facets: Vec<[usize; 4]>,
}

impl ExtrudedMesh {
    /// Uniform periodic mesh on `[x_offset, x_offset + lx] x [0, height]`.
    pub fn new(ncols: usize, nlayers: usize, lx: f64, height: f64, x_offset: f64) -> Result<Self> {
        if ncols < 2 {
            return Err(Error::InvalidMesh(format!("ncols = {ncols}, need at least 2")));
        }
        if nlayers < 1 {
            return Err(Error::InvalidMesh("nlayers must be at least 1".into()));
        }
        if !(lx > 0.0 && lx.is_finite()) || !(height > 0.0 && height.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "domain size must be positive (lx = {lx}, height = {height})"
            )));
        }
        if !x_offset.is_finite() {
            return Err(Error::InvalidMesh("x_offset must be finite".into()));
        }
        let dz = height / nlayers as f64;
        let mut z = Vec::with_capacity(ncols * (nlayers + 1));
        for _ in 0..ncols {
            for k in 0..=nlayers {
                z.push(if k == nlayers { height } else { k as f64 * dz });
            }
        }
        let mut mesh = ExtrudedMesh {
            ncols,
            nlayers,
            lx,
            height,
            x_offset,
            z,
            facets: Vec::new(),
            cell_facets: Vec::new(),
        };
        mesh.build_topology();
        Ok(mesh)
    }

    /// Terrain-following deformation `z -> z + z_s(x) (H - z) / H`.
    pub fn apply_terrain(&self, z_s: impl Fn(f64) -> f64) -> Result<Self> {
        let mut out = self.clone();
        let np = self.nlayers + 1;
        for line in 0..self.ncols {
            let x = self.line_x(line);
            let hs = z_s(x);
            if !(hs >= 0.0 && hs < self.height) {
                return Err(Error::TerrainOutOfRange {
                    x,
                    height: hs,
                    top: self.height,
                });
            }
            for k in 0..np {
                let z0 = self.z[line * np + k];
                out.z[line * np + k] = if k == self.nlayers {
                    self.height
                } else {
                    z0 + hs * (self.height - z0) / self.height
                };
            }
        }
        out.build_topology();
        for c in 0..out.num_cells() {
            for &p in &[[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]] {
                let det = out.corners(c).geometry(p).det_jacobian;
                if !(det > 0.0) {
                    return Err(Error::DegenerateCell { cell: c, det });
                }
            }
        }
        Ok(out)
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nlayers(&self) -> usize {
        self.nlayers
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn x_offset(&self) -> f64 {
        self.x_offset
    }
    pub fn periodic_x(&self) -> bool {
        true
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.ncols as f64
    }
    pub fn num_cells(&self) -> usize {
        self.ncols * self.nlayers
    }

    pub fn cell_index(&self, column: usize, layer: usize) -> usize {
        column * self.nlayers + layer
    }

    /// (column, layer) of a cell.
    pub fn cell_position(&self, cell: usize) -> (usize, usize) {
        (cell / self.nlayers, cell % self.nlayers)
    }

    /// x coordinate of vertex line `line` (`0..=ncols`; line `ncols` is the seam image).
    pub fn line_x(&self, line: usize) -> f64 {
        self.x_offset + line as f64 * self.dx()
    }

    /// Vertex coordinate on line `line` (`0..=ncols`) at level `level`.
    pub fn vertex(&self, line: usize, level: usize) -> [f64; 2] {
        let np = self.nlayers + 1;
        [self.line_x(line), self.z[(line % self.ncols) * np + level]]
    }

    /// Bottom surface height of vertex line `line`.
    pub fn surface_height(&self, line: usize) -> f64 {
        self.vertex(line, 0)[1]
    }

    pub fn corners(&self, cell: usize) -> CellCorners {
        let (i, k) = self.cell_position(cell);
        CellCorners([
            self.vertex(i, k),
            self.vertex(i + 1, k),
            self.vertex(i, k + 1),
            self.vertex(i + 1, k + 1),
        ])
    }

    /// Jacobian data of the map of `cell` at `ref_point`.
    pub fn cell_geometry(&self, cell: usize, ref_point: [f64; 2]) -> Result<CellGeometry> {
        if cell >= self.num_cells() {
            return Err(Error::InvalidArgument(format!("cell {cell} out of range")));
        }
        let g = self.corners(cell).geometry(ref_point);
        if !(g.det_jacobian > 0.0) {
            return Err(Error::DegenerateCell {
                cell,
                det: g.det_jacobian,
            });
        }
        Ok(g)
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        self.corners(cell).area()
    }

    pub fn facets(&self) -> &[FacetRef] {
        &self.facets
    }

    /// Facet ids of a cell in reference order (left, right, bottom, top).
    pub fn cell_facets(&self, cell: usize) -> [usize; 4] {
        self.cell_facets[cell]
    }

    /// Interior facets, vertical ones first.
    pub fn interior_facets(&self) -> impl Iterator<Item = (usize, &FacetRef)> {
        self.facets.iter().enumerate().filter(|(_, f)| f.is_interior())
    }

    /// Cross-facet meshscale: mean area of the two adjacent cells over the facet length.
    pub fn facet_meshscale(&self, facet: &FacetRef) -> Result<f64> {
        let minus = match (facet.is_interior(), facet.minus_cell) {
            (true, Some(m)) => m,
            _ => {
                let id = self.facets.iter().position(|f| f == facet).unwrap_or(usize::MAX);
                return Err(Error::BoundaryFacet(id));
            }
        };
        let mean = 0.5 * (self.cell_area(facet.plus_cell) + self.cell_area(minus));
        Ok(mean / facet.area)
    }

    /// Locate the cell containing a physical point; points outside are clamped
    /// to the nearest cell. Returns the cell, the reference coordinates and
    /// whether clamping occurred.
    pub fn locate(&self, x: f64, z: f64) -> (usize, [f64; 2], bool) {
        let dx = self.dx();
        let rel = (x - self.x_offset) / dx;
        let mut clamped = false;
        let mut col = rel.floor();
        if col < 0.0 {
            col = 0.0;
            clamped = true;
        }
        let mut col = col as usize;
        if col >= self.ncols {
            col = self.ncols - 1;
            clamped = true;
        }
        let mut xi = 2.0 * (x - self.line_x(col)) / dx - 1.0;
        if xi.abs() > 1.0 {
            xi = xi.clamp(-1.0, 1.0);
            clamped = true;
        }
        let s = 0.5 * (xi + 1.0);
        let level_z = |k: usize| {
            (1.0 - s) * self.vertex(col, k)[1] + s * self.vertex(col + 1, k)[1]
        };
        let mut layer = self.nlayers - 1;
        for k in 0..self.nlayers {
            if z <= level_z(k + 1) {
                layer = k;
                break;
            }
        }
        let (zb, zt) = (level_z(layer), level_z(layer + 1));
        let mut zeta = 2.0 * (z - zb) / (zt - zb) - 1.0;
        if zeta.abs() > 1.0 + 1e-12 {
            clamped = true;
        }
        zeta = zeta.clamp(-1.0, 1.0);
        (self.cell_index(col, layer), [xi, zeta], clamped)
    }

    fn build_topology(&mut self) {
        let (nc, nl) = (self.ncols, self.nlayers);
        let mut facets = Vec::with_capacity(nc * nl * 2 + nc * (nl + 1));
        let mut cell_facets = vec![[usize::MAX; 4]; nc * nl];
        let seg = |a: [f64; 2], b: [f64; 2]| ((b[0] - a[0]).hypot(b[1] - a[1]), [b[0] - a[0], b[1] - a[1]]);
        // Interior vertical facets: line i separates column i-1 (plus) and column i (minus).
        for line in 0..nc {
            let left = (line + nc - 1) % nc;
            for k in 0..nl {
                let (len, t) = seg(self.vertex(line, k), self.vertex(line, k + 1));
                let plus = self.cell_index(left, k);
                let minus = self.cell_index(line, k);
                cell_facets[plus][LOCAL_RIGHT] = facets.len();
                cell_facets[minus][LOCAL_LEFT] = facets.len();
                facets.push(FacetRef {
                    kind: FacetKind::InteriorVertical,
                    plus_cell: plus,
                    minus_cell: Some(minus),
                    local_facet_ids: [LOCAL_RIGHT, LOCAL_LEFT],
                    normal: [t[1] / len, -t[0] / len],
                    area: len,
                });
            }
        }
        let horizontal = |col: usize, level: usize| {
            let (len, t) = seg(self.vertex(col, level), self.vertex(col + 1, level));
            (len, [-t[1] / len, t[0] / len])
        };
        for col in 0..nc {
            for level in 1..nl {
                let (len, n) = horizontal(col, level);
                let plus = self.cell_index(col, level - 1);
                let minus = self.cell_index(col, level);
                cell_facets[plus][LOCAL_TOP] = facets.len();
                cell_facets[minus][LOCAL_BOTTOM] = facets.len();
                facets.push(FacetRef {
                    kind: FacetKind::InteriorHorizontal,
                    plus_cell: plus,
                    minus_cell: Some(minus),
                    local_facet_ids: [LOCAL_TOP, LOCAL_BOTTOM],
                    normal: n,
                    area: len,
                });
            }
        }
        for col in 0..nc {
            let (len, n) = horizontal(col, 0);
            let cell = self.cell_index(col, 0);
            cell_facets[cell][LOCAL_BOTTOM] = facets.len();
            facets.push(FacetRef {
                kind: FacetKind::BoundaryBottom,
                plus_cell: cell,
                minus_cell: None,
                local_facet_ids: [LOCAL_BOTTOM, LOCAL_BOTTOM],
                normal: [-n[0], -n[1]],
                area: len,
            });
        }
        for col in 0..nc {
            let (len, n) = horizontal(col, nl);
            let cell = self.cell_index(col, nl - 1);
            cell_facets[cell][LOCAL_TOP] = facets.len();
            facets.push(FacetRef {
                kind: FacetKind::BoundaryTop,
                plus_cell: cell,
                minus_cell: None,
                local_facet_ids: [LOCAL_TOP, LOCAL_TOP],
                normal: n,
                area: len,
            });
        }
        self.facets = facets;
        self.cell_facets = cell_facets;
    }
}
