//! CSV and binary raster export of sampled fields.
//!
//! The raster layout is a 16-byte header (`P` as `u64`, `W` as `f64`, both
//! little-endian) followed by `P * P` samples in row-major order (rows along
//! `x`, `y` increasing between rows), each stored as `re`, `im` little-endian
//! `f64`.

use std::io::{self, Read, Write};

use num_complex::Complex64;

use super::{GridSpec, WaveField};

/// Writes `x,y,re,im` rows with physical coordinates.
pub fn write_csv<W: Write>(field: &WaveField, mut out: W) -> io::Result<()> {
    writeln!(out, "x,y,re,im")?;
    let grid = field.grid();
    let p = grid.points();
    for j in 0..p {
        for i in 0..p {
            let v = field.values()[grid.index(i, j)];
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", grid.coords()[i], grid.coords()[j], v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn write_raster<W: Write>(field: &WaveField, mut out: W) -> io::Result<()> {
    let spec = field.grid().spec();
    out.write_all(&(spec.points() as u64).to_le_bytes())?;
    out.write_all(&spec.half_width().to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a raster back as its grid specification and samples.
pub fn read_raster<R: Read>(mut input: R) -> io::Result<(GridSpec, Vec<Complex64>)> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let p = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let w = f64::from_le_bytes(word);
    let spec = GridSpec::new(w, p).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut values = Vec::with_capacity(p * p);
    for _ in 0..p * p {
        input.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        input.read_exact(&mut word)?;
        values.push(Complex64::new(re, f64::from_le_bytes(word)));
    }
    Ok((spec, values))
}
