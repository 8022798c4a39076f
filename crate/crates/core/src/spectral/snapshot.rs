//! `BNSL` binary snapshot format.
//!
//! Layout (little-endian): magic `BNSL`, version `u32 = 1`, dimension `u32`,
//! components `u32`, `n` `u32`, time `f64`, epsilon `f64`, then
//! `components · n²` coefficients as `(re: f64, im: f64)` pairs in
//! row-major FFT-standard frequency order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BNSL";
pub const VERSION: u32 = 1;

/// A field together with the viscosity it was computed under.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: SpectralField,
    pub epsilon: f64,
}

pub fn encode(field: &SpectralField, epsilon: f64) -> Vec<u8> {
    let n = field.grid().n();
    let mut out = Vec::with_capacity(36 + 16 * field.coeffs().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(Grid::DIMENSION as u32).to_le_bytes());
    out.extend_from_slice(&(field.components() as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&field.time().unwrap_or(0.0).to_le_bytes());
    out.extend_from_slice(&epsilon.to_le_bytes());
    for z in field.coeffs() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> std::result::Result<Snapshot, String> {
    let mut r = bytes;
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| "truncated header".to_string())?;
    if &magic != MAGIC {
        return Err(format!("bad magic {magic:?}"));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let dimension = read_u32(&mut r)?;
    if dimension as usize != Grid::DIMENSION {
        return Err(format!("unsupported dimension {dimension}"));
    }
    let components = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let time = read_f64(&mut r)?;
    let epsilon = read_f64(&mut r)?;
    let grid = Grid::new(n).map_err(|e| e.to_string())?;
    let count = components * grid.len();
    if r.len() != 16 * count {
        return Err(format!("expected {} coefficient bytes, found {}", 16 * count, r.len()));
    }
    let coeffs = (0..count)
        .map(|_| Ok(Complex64::new(read_f64(&mut r)?, read_f64(&mut r)?)))
        .collect::<std::result::Result<Vec<_>, String>>()?;
    let field = SpectralField::from_coeffs(grid, components, coeffs)
        .map_err(|e| e.to_string())?
        .with_time(time);
    Ok(Snapshot { field, epsilon })
}

pub fn write(path: &Path, field: &SpectralField, epsilon: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(field, epsilon))?;
    w.flush()?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode(&bytes).map_err(|reason| Error::Snapshot { path: path.to_path_buf(), reason })
}

fn read_u32(r: &mut &[u8]) -> std::result::Result<u32, String> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| "truncated header".to_string())?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut &[u8]) -> std::result::Result<f64, String> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| "truncated data".to_string())?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_bit_exact() {
        let g = Grid::new(16).unwrap();
        let f = SpectralField::cosine_mode(g, 2, 1, (1, 0), 2.0).with_time(0.25);
        let bytes = encode(&f, 0.01);
        assert_eq!(&bytes[0..4], b"BNSL");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 16);
        assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 0.25);
        assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()), 0.01);
        assert_eq!(bytes.len(), 36 + 2 * 256 * 16);
        // component 1, frequency (1, 0) sits at flat index 1·16 + 0 = 16
        let off = 36 + 16 * (256 + 16);
        assert_eq!(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()), 1.0);
        let back = decode(&bytes).unwrap();
        assert_eq!(back.field, f);
        assert_eq!(back.epsilon, 0.01);
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = Grid::new(16).unwrap();
        let mut bytes = encode(&SpectralField::zeros(g, 1), 0.0);
        assert!(decode(&bytes[..30]).is_err());
        bytes.pop();
        assert!(decode(&bytes).is_err());
        bytes[0] = b'X';
        assert!(decode(&bytes).is_err());
    }
}
