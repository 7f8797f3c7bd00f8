//! BMGF binary grid files.
//!
//! Layout: magic bytes `BMGF`, u32 version = 1, u32 n, u32 dims[n], f64 L,
//! then N^n little-endian f64 samples, row-major.

use super::{GridFunction, GridSpec};
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"BMGF";
const VERSION: u32 = 1;

pub fn write_bmgf(f: &GridFunction, w: &mut impl Write) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(f.spec.dim as u32).to_le_bytes())?;
    for _ in 0..f.spec.dim {
        w.write_all(&(f.spec.size as u32).to_le_bytes())?;
    }
    w.write_all(&f.spec.len.to_le_bytes())?;
    for v in &f.samples {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_bmgf(r: &mut impl Read) -> Result<GridFunction> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = read_u32(r)? as usize;
    if !(dim == 2 || dim == 3) {
        return Err(Error::Format(format!("dimension {dim} out of range")));
    }
    let mut dims = Vec::with_capacity(dim);
    for _ in 0..dim {
        dims.push(read_u32(r)? as usize);
    }
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(Error::Format(format!("anisotropic dims {dims:?} not supported")));
    }
    let len = read_f64(r)?;
    let spec = GridSpec::new(dim, dims[0], len)?;
    let mut samples = vec![0.0f64; spec.node_count()];
    let mut buf = [0u8; 8];
    for v in samples.iter_mut() {
        r.read_exact(&mut buf)?;
        *v = f64::from_le_bytes(buf);
    }
    GridFunction::new(spec, samples)
}

pub fn write_bmgf_file(f: &GridFunction, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_bmgf(f, &mut w)
}

pub fn read_bmgf_file(path: &Path) -> Result<GridFunction> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_bmgf(&mut r)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
