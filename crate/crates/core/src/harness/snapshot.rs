//! Binary field snapshots.
//!
//! Layout, all little-endian: `b"QNSF"`, `u16` version, `u32` grid size,
//! `u32` field count, then per field a `u16` name length, the UTF-8 name and
//! `n * n` `f64` values with x fastest.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::grid::{Grid2D, ScalarField};

pub const MAGIC: [u8; 4] = *b"QNSF";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("BAD_MAGIC: expected QNSF, found {0:?}")]
    BadMagic([u8; 4]),
    #[error("VERSION_MISMATCH: expected {VERSION}, found {0}")]
    VersionMismatch(u16),
    #[error("TRUNCATED: needed {needed} bytes at offset {offset}, {available} available")]
    Truncated { offset: usize, needed: usize, available: usize },
    #[error("snapshot field {index} has a name that is not UTF-8")]
    BadName { index: usize },
    #[error("snapshot grid size {0} is not a valid grid")]
    BadGrid(u32),
    #[error("{0} trailing bytes after the last field")]
    Trailing(usize),
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid_n: u32,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    pub fn from_fields(fields: &[(&str, &ScalarField)]) -> Self {
        let grid_n = fields.first().map_or(0, |(_, f)| f.grid().n() as u32);
        Self {
            grid_n,
            fields: fields
                .iter()
                .map(|(name, f)| (name.to_string(), f.values().to_vec()))
                .collect(),
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Named field as a grid function, if present.
    pub fn scalar(&self, name: &str) -> Option<ScalarField> {
        let grid = Grid2D::new(self.grid_n as usize).ok()?;
        ScalarField::from_values(grid, self.field(name)?.to_vec()).ok()
    }

    pub fn encode(&self) -> Vec<u8> {
        let per_field = (self.grid_n as usize).pow(2);
        let mut out = Vec::with_capacity(14 + self.fields.len() * (per_field * 8 + 16));
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.grid_n.to_le_bytes());
        out.extend_from_slice(&(self.fields.len() as u32).to_le_bytes());
        for (name, values) in &self.fields {
            assert_eq!(values.len(), per_field, "field {name} has the wrong length");
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let mut r = Reader { bytes, offset: 0 };
        let magic: [u8; 4] = r.take(4)?.try_into().unwrap();
        if magic != MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
        if version != VERSION {
            return Err(SnapshotError::VersionMismatch(version));
        }
        let grid_n = r.u32()?;
        if Grid2D::new(grid_n as usize).is_err() {
            return Err(SnapshotError::BadGrid(grid_n));
        }
        let count = r.u32()? as usize;
        let per_field = (grid_n as usize).pow(2);
        let mut fields = Vec::new();
        for index in 0..count {
            let len = u16::from_le_bytes(r.take(2)?.try_into().unwrap()) as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| SnapshotError::BadName { index })?
                .to_string();
            let raw = r.take(per_field * 8)?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            fields.push((name, values));
        }
        if r.offset != bytes.len() {
            return Err(SnapshotError::Trailing(bytes.len() - r.offset));
        }
        Ok(Self { grid_n, fields })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, needed: usize) -> Result<&'a [u8], SnapshotError> {
        let available = self.bytes.len() - self.offset;
        if needed > available {
            return Err(SnapshotError::Truncated {
                offset: self.offset,
                needed,
                available,
            });
        }
        let s = &self.bytes[self.offset..self.offset + needed];
        self.offset += needed;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn write_snapshot(fields: &[(&str, &ScalarField)], path: &Path) -> Result<(), SnapshotError> {
    fs::write(path, Snapshot::from_fields(fields).encode())?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, SnapshotError> {
    Snapshot::decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        let g = Grid2D::new(8).unwrap();
        let a = ScalarField::from_fn(g, |x, y| (x * 3.0).sin() + y.exp());
        let b = ScalarField::from_fn(g, |x, _| -x / 7.0);
        Snapshot::from_fields(&[("n", &a), ("mx", &b)])
    }

    #[test]
    fn round_trip_is_bitwise() {
        let s = sample();
        let back = Snapshot::decode(&s.encode()).unwrap();
        assert_eq!(back.grid_n, 8);
        for ((na, va), (nb, vb)) in s.fields.iter().zip(&back.fields) {
            assert_eq!(na, nb);
            assert!(va.iter().zip(vb).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn header_layout() {
        let bytes = sample().encode();
        assert_eq!(&bytes[..4], b"QNSF");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(bytes.len(), 14 + 2 * (2 + 64 * 8) + 3);
    }

    #[test]
    fn malformed_inputs() {
        let bytes = sample().encode();
        for cut in [0, 3, 5, 13, 20, bytes.len() - 1] {
            assert!(matches!(Snapshot::decode(&bytes[..cut]), Err(SnapshotError::Truncated { .. })), "cut {cut}");
        }
        let mut foreign = bytes.clone();
        foreign[..4].copy_from_slice(b"XXXX");
        assert!(matches!(Snapshot::decode(&foreign), Err(SnapshotError::BadMagic(_))));
        let mut future = bytes;
        future[4] = 2;
        assert!(matches!(Snapshot::decode(&future), Err(SnapshotError::VersionMismatch(2))));
    }
}
