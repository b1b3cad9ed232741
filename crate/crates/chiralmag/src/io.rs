//! File formats: field dumps (CSV), field images (binary P6 pixmap with a
//! diverging colormap on the out-of-plane component), energy traces (CSV)
//! and plain binary checkpoints.

use crate::error::{Error, Result};
use crate::field::{ModelParams, RealField};
use crate::flow::TraceEntry;
use crate::lattice::LatticeSpec;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Checkpoint magic bytes.
pub const CHECKPOINT_MAGIC: [u8; 4] = *b"CMGF";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Writes `i,j,x1,x2,m1,m2,m3` rows, row-major, 17 significant digits.
pub fn write_field_csv(path: &Path, field: &RealField, spec: &LatticeSpec) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "i,j,x1,x2,m1,m2,m3")?;
    let n = field.n();
    for i in 0..n {
        for j in 0..n {
            let x = spec.grid_point(i, j, n);
            let m = field.get(i, j);
            writeln!(
                w,
                "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                x[0], x[1], m[0], m[1], m[2]
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes a binary P6 pixmap, one pixel per grid point, with a diverging
/// colormap on `m3`: blue at `-max|m3|`, white at 0, red at `+max|m3|`.
/// Rows run from large to small `j` so the second lattice direction points
/// up in the image.
pub fn write_field_ppm(path: &Path, field: &RealField) -> Result<()> {
    let n = field.n();
    let max = field
        .values()
        .iter()
        .map(|m| m[2].abs())
        .fold(0.0_f64, f64::max);
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P6\n{n} {n}\n255\n")?;
    let mut row = Vec::with_capacity(3 * n);
    for jr in 0..n {
        let j = n - 1 - jr;
        row.clear();
        for i in 0..n {
            let t = if max > 0.0 { field.get(i, j)[2] / max } else { 0.0 };
            let (r, g, b) = if t < 0.0 {
                let s = (255.0 * (1.0 + t)).round().clamp(0.0, 255.0) as u8;
                (s, s, 255)
            } else {
                let s = (255.0 * (1.0 - t)).round().clamp(0.0, 255.0) as u8;
                (255, s, s)
            };
            row.extend_from_slice(&[r, g, b]);
        }
        w.write_all(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `step,time,energy,fp_iters` rows.
pub fn write_energy_trace(path: &Path, trace: &[TraceEntry]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "step,time,energy,fp_iters")?;
    for e in trace {
        writeln!(w, "{},{:.16e},{:.16e},{}", e.step, e.time, e.energy, e.fp_iters)?;
    }
    w.flush()?;
    Ok(())
}

/// Checkpoint layout: magic `CMGF`, version u32, grid size u32, the four
/// model parameters as little-endian f64, then row-major f64 triples.
pub fn write_checkpoint(path: &Path, field: &RealField, p: &ModelParams) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(field.n() as u32).to_le_bytes())?;
    for val in [p.kappa, p.lambda, p.alpha, p.beta] {
        w.write_all(&val.to_le_bytes())?;
    }
    for m in field.values() {
        for c in m {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(RealField, ModelParams)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != CHECKPOINT_MAGIC {
        return Err(Error::Parse(format!(
            "{}: not a checkpoint (bad magic)",
            path.display()
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Parse(format!("unsupported checkpoint version {version}")));
    }
    r.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf) as usize;
    let mut f64buf = [0u8; 8];
    let mut params = [0.0_f64; 4];
    for v in params.iter_mut() {
        r.read_exact(&mut f64buf)?;
        *v = f64::from_le_bytes(f64buf);
    }
    let p = ModelParams::new(params[0], params[1], params[2], params[3])?;
    let mut field = RealField::zeros(n)?;
    for m in field.values_mut() {
        for c in m.iter_mut() {
            r.read_exact(&mut f64buf)?;
            *c = f64::from_le_bytes(f64buf);
        }
    }
    Ok((field, p))
}
