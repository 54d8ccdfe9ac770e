//! LPF1 binary field files and their JSON sidecars.
//!
//! Layout: 12-byte magic, u32 version, then u32 d, u32 N, f64 L, u8 mean-zero flag and
//! N^d coefficients as interleaved (re, im) f64, all little-endian, in storage order.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use lplab_core::{Grid, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub const MAGIC: &[u8; 12] = b"LPF1-lplab\0\0";
pub const VERSION: u32 = 1;
const HEADER: usize = 16 + 4 + 4 + 8 + 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub n: usize,
    pub l: f64,
    pub mean_zero: bool,
    pub coefficients: usize,
    pub source: String,
}

pub fn encode(f: &SpectralField) -> Vec<u8> {
    let g = f.grid;
    let mut out = Vec::with_capacity(HEADER + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim as u32).to_le_bytes());
    out.extend_from_slice(&(g.n as u32).to_le_bytes());
    out.extend_from_slice(&g.l.to_le_bytes());
    out.push(f.mean_zero as u8);
    for c in f.coef() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("four bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("eight bytes"))
}

pub fn decode(b: &[u8]) -> AppResult<SpectralField> {
    let bad = |m: &str| AppError::Format(m.to_string());
    if b.len() < HEADER {
        return Err(bad("truncated header"));
    }
    if &b[..12] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32_at(b, 12);
    if version != VERSION {
        return Err(AppError::Format(format!("unsupported version {version}")));
    }
    let dim = u32_at(b, 16) as usize;
    let n = u32_at(b, 20) as usize;
    let l = f64_at(b, 24);
    let flag = b[32];
    if flag > 1 {
        return Err(bad("mean-zero flag must be 0 or 1"));
    }
    let grid = Grid::new(dim, n, l)?;
    let want = HEADER + 16 * grid.len();
    if b.len() != want {
        return Err(AppError::Format(format!(
            "expected {want} bytes, found {}",
            b.len()
        )));
    }
    let coef: Vec<Complex64> = b[HEADER..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    if flag == 1 && coef[0] != Complex64::new(0.0, 0.0) {
        return Err(bad("mean-zero flag set but zero mode is nonzero"));
    }
    Ok(SpectralField::from_coef(grid, coef, flag == 1)?)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_field(path: &Path, f: &SpectralField, source: &str) -> AppResult<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode(f))?;
    let side = Sidecar {
        format: "LPF1".into(),
        version: VERSION,
        dim: f.grid.dim,
        n: f.grid.n,
        l: f.grid.l,
        mean_zero: f.mean_zero,
        coefficients: f.grid.len(),
        source: source.into(),
    };
    fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&side)? + "\n",
    )?;
    Ok(())
}

pub fn read_field(path: &Path) -> AppResult<SpectralField> {
    let mut b = Vec::new();
    fs::File::open(path)?.read_to_end(&mut b)?;
    decode(&b)
}
