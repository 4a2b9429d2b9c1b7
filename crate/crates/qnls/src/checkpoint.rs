//! Binary checkpoint format for simulation states.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic      4 bytes  "QNLS"
//! version    u32      currently 1
//! dim        u32
//! points     u64 × dim
//! half_width f64 × dim
//! components u32
//! sim_time   f64
//! wall_time  f64      seconds since the Unix epoch when written
//! data       f64 pairs (re, im), row-major per component, components in order
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;

use crate::error::QnlsError;
use crate::field::SpectralField;
use crate::grid::Grid;

const MAGIC: &[u8; 4] = b"QNLS";
const VERSION: u32 = 1;

/// A simulation state together with its timestamps.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    /// The stored field.
    pub field: SpectralField,
    /// Simulation time of the state.
    pub sim_time: f64,
    /// Wall-clock seconds since the Unix epoch at write time.
    pub wall_time: f64,
}

/// Write `field` at simulation time `sim_time` to `path`.
pub fn write_checkpoint(
    path: &Path,
    field: &SpectralField,
    sim_time: f64,
) -> Result<(), QnlsError> {
    let mut w = BufWriter::new(File::create(path)?);
    let grid = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for a in 0..grid.dim() {
        w.write_all(&(grid.points(a) as u64).to_le_bytes())?;
    }
    for a in 0..grid.dim() {
        w.write_all(&grid.half_width(a).to_le_bytes())?;
    }
    w.write_all(&(field.num_components() as u32).to_le_bytes())?;
    w.write_all(&sim_time.to_le_bytes())?;
    let wall = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    w.write_all(&wall.to_le_bytes())?;
    for c in 0..field.num_components() {
        for z in field.component(c) {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a checkpoint back from `path`.
pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, QnlsError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(QnlsError::Format(format!(
            "{}: bad magic {:?}",
            path.display(),
            magic
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(QnlsError::Format(format!(
            "{}: unsupported checkpoint version {version}",
            path.display()
        )));
    }
    let dim = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&dim) {
        return Err(QnlsError::Format(format!("{}: bad dimension {dim}", path.display())));
    }
    let mut points = Vec::with_capacity(dim);
    for _ in 0..dim {
        points.push(read_u64(&mut r)? as usize);
    }
    let mut half_widths = Vec::with_capacity(dim);
    for _ in 0..dim {
        half_widths.push(read_f64(&mut r)?);
    }
    let grid = Grid::new(points, half_widths)
        .map_err(|e| QnlsError::Format(format!("{}: {e}", path.display())))?;
    let components = read_u32(&mut r)? as usize;
    if components == 0 || components > 64 {
        return Err(QnlsError::Format(format!(
            "{}: bad component count {components}",
            path.display()
        )));
    }
    let sim_time = read_f64(&mut r)?;
    let wall_time = read_f64(&mut r)?;
    let mut comps = Vec::with_capacity(components);
    let len = grid.len();
    let mut buf = vec![0u8; len * 16];
    for _ in 0..components {
        r.read_exact(&mut buf)?;
        let data: Vec<Complex64> = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        comps.push(data);
    }
    // Trailing garbage means a corrupt or mismatched file.
    let mut one = [0u8; 1];
    if r.read(&mut one)? != 0 {
        return Err(QnlsError::Format(format!(
            "{}: trailing bytes after field data",
            path.display()
        )));
    }
    Ok(Checkpoint { field: SpectralField::from_components(grid, comps), sim_time, wall_time })
}

fn read_u32(r: &mut impl Read) -> Result<u32, QnlsError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64, QnlsError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, QnlsError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
