//! Binary field snapshots.
//!
//! Layout (little-endian): magic `CNLS`, `u32` version (1), `u32` dim,
//! `u32` points per axis, `f64` box length, then `N^n` samples as
//! interleaved `(re, im)` `f64` pairs in row-major order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::Field;
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CNLS";
pub const VERSION: u32 = 1;

pub fn write_field(w: &mut impl Write, u: &Field) -> Result<()> {
    let g = u.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.points() as u32).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * u.values().len());
    for v in u.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field(r: &mut impl Read) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a CNLS snapshot".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let dim = read_u32(r)? as usize;
    let points = read_u32(r)? as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let length = f64::from_le_bytes(b8);
    let grid = GridSpec::new(dim, points, length)?;
    let mut raw = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after samples".into()));
    }
    Field::new(grid, values)
}

pub fn save(path: impl AsRef<Path>, u: &Field) -> Result<()> {
    let mut buf = Vec::new();
    write_field(&mut buf, u)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Field> {
    let bytes = fs::read(path)?;
    read_field(&mut bytes.as_slice())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
