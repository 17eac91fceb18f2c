//! Binary field snapshots.
//!
//! Layout (little-endian): magic `CNSM`, version `u16`, kind `u8` (0 scalar,
//! 1 vector), `nx`, `ny` as `u32`, `lx`, `ly` as `f64`, then the row-major
//! payload (x plane then y plane for vectors).

use crate::error::{CliError, CliResult};
use cnsm_core::operators::{build_grid, Grid, ScalarField, VectorField};
use ndarray::Array2;
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"CNSM";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 4 + 4 + 8 + 8;

#[derive(Clone, Debug, PartialEq)]
pub enum Snapshot {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl Snapshot {
    pub fn grid(&self) -> Grid {
        match self {
            Snapshot::Scalar(f) => f.grid,
            Snapshot::Vector(f) => f.grid,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.grid();
        let (kind, planes): (u8, Vec<&Array2<f64>>) = match self {
            Snapshot::Scalar(f) => (0, vec![&f.values]),
            Snapshot::Vector(f) => (1, vec![&f.x, &f.y]),
        };
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len() * planes.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(kind);
        out.extend_from_slice(&(g.nx as u32).to_le_bytes());
        out.extend_from_slice(&(g.ny as u32).to_le_bytes());
        out.extend_from_slice(&g.lx.to_le_bytes());
        out.extend_from_slice(&g.ly.to_le_bytes());
        for plane in planes {
            for v in plane.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Decodes a snapshot; `origin` labels errors.
    pub fn from_bytes(bytes: &[u8], origin: &Path) -> CliResult<Self> {
        let bad = |reason: String| CliError::Snapshot { path: origin.to_path_buf(), reason };
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(bad("missing CNSM magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let kind = bytes[6];
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let (nx, ny) = (u32_at(7), u32_at(11));
        let (lx, ly) = (f64_at(15), f64_at(23));
        let planes = match kind {
            0 => 1,
            1 => 2,
            k => return Err(bad(format!("unknown kind {k}"))),
        };
        let want = nx
            .checked_mul(ny)
            .and_then(|n| n.checked_mul(8 * planes))
            .ok_or_else(|| bad("dimensions overflow".into()))?;
        if bytes.len() - HEADER_LEN != want {
            return Err(bad(format!("payload has {} bytes, header implies {want}", bytes.len() - HEADER_LEN)));
        }
        let grid = build_grid(lx, ly, nx, ny).map_err(|e| bad(e.to_string()))?;
        let n = nx * ny;
        let plane = |k: usize| {
            let start = HEADER_LEN + 8 * n * k;
            let vals: Vec<f64> = (0..n).map(|i| f64_at(start + 8 * i)).collect();
            Array2::from_shape_vec((ny, nx), vals).expect("shape checked")
        };
        Ok(match kind {
            0 => Snapshot::Scalar(ScalarField::new(grid, plane(0)).map_err(|e| bad(e.to_string()))?),
            _ => Snapshot::Vector(VectorField::new(grid, plane(0), plane(1)).map_err(|e| bad(e.to_string()))?),
        })
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}
