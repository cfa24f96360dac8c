//! Binary field snapshots.
//!
//! Layout, all little-endian: `b"HWMF"`, version `u32`, `d: u32`, `N_j: u32` × d,
//! `L_j: f64` × d, component count `u32`, then each component's values as
//! row-major `f64`.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::TorusGrid;

pub const MAGIC: &[u8; 4] = b"HWMF";
pub const VERSION: u32 = 1;

/// Writes the components of one field snapshot.
pub fn write_fields<W: Write>(mut w: W, comps: &[&ScalarField]) -> Result<()> {
    let grid = comps
        .first()
        .ok_or_else(|| Error::Dump("no components to write".into()))?
        .grid();
    if comps.iter().any(|c| c.grid() != grid) {
        return Err(Error::Dump("components live on different grids".into()));
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &n in grid.sizes() {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for &l in grid.lengths() {
        w.write_all(&l.to_le_bytes())?;
    }
    w.write_all(&(comps.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.len() * 8);
    for c in comps {
        buf.clear();
        for v in c.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a snapshot written by [`write_fields`].
pub fn read_fields<R: Read>(mut r: R) -> Result<Vec<ScalarField>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Dump("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Dump(format!("unsupported version {version}")));
    }
    let d = read_u32(&mut r)? as usize;
    if d == 0 || d > crate::grid::MAX_DIM {
        return Err(Error::Dump(format!("dimension {d}")));
    }
    let sizes = (0..d).map(|_| read_u32(&mut r).map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
    let lengths = (0..d).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    let grid = Arc::new(TorusGrid::new(sizes, lengths)?);
    let count = read_u32(&mut r)? as usize;
    let mut buf = vec![0u8; grid.len() * 8];
    (0..count)
        .map(|_| {
            r.read_exact(&mut buf)?;
            let values = buf.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
            ScalarField::new(grid.clone(), values)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise() {
        let g = Arc::new(TorusGrid::new(vec![8, 10], vec![1.5, 2.0]).unwrap());
        let a = ScalarField::from_fn(&g, |x| x[0].sin() * x[1]);
        let b = ScalarField::from_fn(&g, |x| 1.0 / (1.0 + x[0] + x[1]));
        let mut bytes = Vec::new();
        write_fields(&mut bytes, &[&a, &b]).unwrap();
        assert_eq!(&bytes[..4], MAGIC);
        assert_eq!(bytes.len(), 4 + 4 + 4 + 2 * 4 + 2 * 8 + 4 + 2 * 80 * 8);
        let back = read_fields(&bytes[..]).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_fields(&b"NOPE\x01\x00\x00\x00"[..]).is_err());
        let g = Arc::new(TorusGrid::cubic(1, 8, 1.0).unwrap());
        let mut bytes = Vec::new();
        write_fields(&mut bytes, &[&ScalarField::zeros(&g)]).unwrap();
        bytes.truncate(bytes.len() - 1);
        assert!(read_fields(&bytes[..]).is_err());
    }
}
