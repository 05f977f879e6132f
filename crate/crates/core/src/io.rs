//! Field sampling, export and checkpoints.
//!
//! Fields are evaluated on a uniform `(x, z)` grid and written either as
//! whitespace-separated columns with a `#` metadata header or as a small
//! little-endian binary block. Checkpoints store the raw coefficient vectors.

use std::io::{self, BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::femspace::eval::{scalar_at, velocity_at};
use crate::femspace::Field;
use crate::forms::constants::{exner, PhysicalConstants};
use crate::forms::state::{Spaces, State};

/// Uniform sample grid, `nx` by `nz` points including the end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub nx: usize,
    pub nz: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl SampleGrid {
    /// Grid covering the whole (undeformed) domain of `spaces`.
    pub fn covering(spaces: &Spaces, nx: usize, nz: usize) -> Self {
        let m = &spaces.mesh;
        SampleGrid {
            nx,
            nz,
            x_min: m.x_offset(),
            x_max: m.x_offset() + m.lx(),
            z_min: 0.0,
            z_max: m.height(),
        }
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        Self::coord(self.x_min, self.x_max, self.nx, i)
    }

    pub fn z(&self, k: usize) -> f64 {
        Self::coord(self.z_min, self.z_max, self.nz, k)
    }
}

/// Sampled fields in row-major order (x fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFields {
    pub grid: SampleGrid,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub rho: Vec<f64>,
    pub pi: Vec<f64>,
    /// Points outside the deformed domain, evaluated in the nearest cell.
    pub clamped: usize,
}

pub const FIELD_NAMES: [&str; 6] = ["x", "z", "w", "dtheta", "rho", "pi"];

impl SampledFields {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn columns(&self) -> [&[f64]; 6] {
        [&self.x, &self.z, &self.w, &self.dtheta, &self.rho, &self.pi]
    }
}

/// Evaluate `w`, `theta - theta_b`, `rho` and the Exner pressure on `grid`.
pub fn sample_fields(
    state: &State,
    theta_b: &Field,
    spaces: &Spaces,
    constants: &PhysicalConstants,
    grid: SampleGrid,
) -> Result<SampledFields> {
    let mesh = &spaces.mesh;
    let n = grid.nx * grid.nz;
    let mut out = SampledFields {
        grid,
        x: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        dtheta: Vec::with_capacity(n),
        rho: Vec::with_capacity(n),
        pi: Vec::with_capacity(n),
        clamped: 0,
    };
    for k in 0..grid.nz {
        for i in 0..grid.nx {
            let (x, z) = (grid.x(i), grid.z(k));
            let (cell, xi, clamped) = mesh.locate(x, z);
            if clamped {
                out.clamped += 1;
            }
            let g = mesh.corners(cell).geometry(xi);
            let u = velocity_at(&state.u, &spaces.velocity, &g, cell, xi).0;
            let th = scalar_at(&state.theta, &spaces.theta, &g, cell, xi).0;
            let thb = scalar_at(theta_b, &spaces.theta, &g, cell, xi).0;
            let r = scalar_at(&state.rho, &spaces.density, &g, cell, xi).0;
            out.x.push(x);
            out.z.push(z);
            out.w.push(u[1]);
            out.dtheta.push(th - thb);
            out.rho.push(r);
            out.pi.push(exner(r, th, constants)?.0);
        }
    }
    Ok(out)
}

/// Columnar text: `# key: value` header lines, a column-name line, then rows.
pub fn write_columnar<W: Write>(mut w: W, fields: &SampledFields, metadata: &[(&str, String)]) -> io::Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k}: {v}")?;
    }
    writeln!(w, "# grid: {} x {}", fields.grid.nx, fields.grid.nz)?;
    writeln!(w, "{}", FIELD_NAMES.join(" "))?;
    let cols = fields.columns();
    for i in 0..fields.len() {
        let row: Vec<String> = cols.iter().map(|c| format!("{:.10e}", c[i])).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Parse the output of [`write_columnar`]: metadata pairs and named columns.
pub fn read_columnar<R: BufRead>(r: R) -> Result<(Vec<(String, String)>, Vec<(String, Vec<f64>)>)> {
    let mut meta = Vec::new();
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    for line in r.lines() {
        let line = line.map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(": ") {
                meta.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if cols.is_empty() {
            cols = line.split_whitespace().map(|s| (s.to_string(), Vec::new())).collect();
            continue;
        }
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != cols.len() {
            return Err(Error::Dimension {
                expected: cols.len(),
                got: vals.len(),
            });
        }
        for (c, v) in cols.iter_mut().zip(vals) {
            c.1.push(v.parse().map_err(|_| Error::InvalidArgument(format!("bad number '{v}'")))?);
        }
    }
    Ok((meta, cols))
}

const GRID_MAGIC: &[u8; 8] = b"SLCGRID1";
const CHECKPOINT_MAGIC: &[u8; 8] = b"SLCCHKP1";

fn put_u64<W: Write>(w: &mut W, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64s<W: Write>(w: &mut W, v: &[f64]) -> io::Result<()> {
    put_u64(w, v.len() as u64)?;
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn get_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn get_f64s<R: Read>(r: &mut R) -> io::Result<Vec<f64>> {
    let n = get_u64(r)? as usize;
    (0..n).map(|_| get_f64(r)).collect()
}

/// Structured-grid binary: magic, `nx`, `nz`, then each field of
/// [`FIELD_NAMES`] as a length-prefixed little-endian `f64` array.
pub fn write_binary<W: Write>(mut w: W, fields: &SampledFields) -> io::Result<()> {
    w.write_all(GRID_MAGIC)?;
    put_u64(&mut w, fields.grid.nx as u64)?;
    put_u64(&mut w, fields.grid.nz as u64)?;
    for c in fields.columns() {
        put_f64s(&mut w, c)?;
    }
    Ok(())
}

/// Read a binary grid back as `(nx, nz, columns in FIELD_NAMES order)`.
pub fn read_binary<R: Read>(mut r: R) -> Result<(usize, usize, Vec<Vec<f64>>)> {
    let io_err = |e: io::Error| Error::InvalidArgument(format!("binary grid: {e}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != GRID_MAGIC {
        return Err(Error::InvalidArgument("not a binary grid file".into()));
    }
    let nx = get_u64(&mut r).map_err(io_err)? as usize;
    let nz = get_u64(&mut r).map_err(io_err)? as usize;
    let cols = (0..FIELD_NAMES.len())
        .map(|_| get_f64s(&mut r))
        .collect::<io::Result<Vec<_>>>()
        .map_err(io_err)?;
    Ok((nx, nz, cols))
}

/// Saved run state.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: usize,
    pub time: f64,
    pub state: State,
}

pub fn write_checkpoint<W: Write>(mut w: W, step: usize, time: f64, state: &State) -> io::Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    put_u64(&mut w, step as u64)?;
    w.write_all(&time.to_le_bytes())?;
    put_f64s(&mut w, &state.u.coefficients)?;
    match &state.u_y {
        Some(f) => put_f64s(&mut w, &f.coefficients)?,
        None => put_u64(&mut w, u64::MAX)?,
    }
    put_f64s(&mut w, &state.rho.coefficients)?;
    put_f64s(&mut w, &state.theta.coefficients)
}

pub fn read_checkpoint<R: Read>(mut r: R, spaces: &Spaces) -> Result<Checkpoint> {
    let io_err = |e: io::Error| Error::InvalidArgument(format!("checkpoint: {e}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::InvalidArgument("not a checkpoint file".into()));
    }
    let step = get_u64(&mut r).map_err(io_err)? as usize;
    let time = get_f64(&mut r).map_err(io_err)?;
    let u = get_f64s(&mut r).map_err(io_err)?;
    let ny = get_u64(&mut r).map_err(io_err)?;
    let u_y = if ny == u64::MAX {
        None
    } else {
        Some(
            (0..ny)
                .map(|_| get_f64(&mut r))
                .collect::<io::Result<Vec<_>>>()
                .map_err(io_err)?,
        )
    };
    let rho = get_f64s(&mut r).map_err(io_err)?;
    let theta = get_f64s(&mut r).map_err(io_err)?;
    let state = State {
        u: Field::from_coefficients(&spaces.velocity, u)?,
        u_y: match (u_y, &spaces.y_velocity) {
            (Some(c), Some(d)) => Some(Field::from_coefficients(d, c)?),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidArgument(
                    "checkpoint out-of-plane velocity does not match the spaces".into(),
                ))
            }
        },
        rho: Field::from_coefficients(&spaces.density, rho)?,
        theta: Field::from_coefficients(&spaces.theta, theta)?,
    };
    Ok(Checkpoint { step, time, state })
}
