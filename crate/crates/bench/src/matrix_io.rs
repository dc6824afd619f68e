//! Binary matrix files.
//!
//! Layout, all little-endian: the 4-byte magic `TSVD`, a `u32` version, the
//! row count `m` and column count `n` as `u64`s (24 header bytes), then the
//! `m·n` entries as row-major IEEE-754 doubles.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use tsvd_core::{BlockRowMatrix, SmallDense};

use crate::error::BenchError;

pub const MAGIC: [u8; 4] = *b"TSVD";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;

/// Writes `a` to `w` in the matrix file format.
pub fn write_matrix<W: Write>(a: &BlockRowMatrix, mut w: W) -> Result<(), BenchError> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(a.n_rows() as u64).to_le_bytes())?;
    w.write_all(&(a.n_cols() as u64).to_le_bytes())?;
    for block in a.blocks() {
        for x in block.data() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix file, splitting it into blocks of `block_rows` rows.
pub fn read_matrix<R: Read>(mut r: R, block_rows: usize) -> Result<BlockRowMatrix, BenchError> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| BenchError::Format("file shorter than the 24-byte header".into()))?;
    if header[..4] != MAGIC {
        return Err(BenchError::Format("bad magic, expected \"TSVD\"".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(BenchError::Format(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let m = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
    let n = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes"));
    let len = m
        .checked_mul(n)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| BenchError::Format(format!("dimensions {m}x{n} overflow")))?;

    let mut data = Vec::new();
    let mut buf = [0u8; 8];
    // Read incrementally so a lying header cannot force a huge allocation.
    for _ in 0..len {
        r.read_exact(&mut buf).map_err(|_| {
            BenchError::Format(format!("truncated payload: expected {len} entries"))
        })?;
        data.push(f64::from_le_bytes(buf));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(BenchError::Format("trailing bytes after payload".into()));
    }
    let dense = SmallDense::new(m as usize, n as usize, data)
        .map_err(|e| BenchError::Format(e.to_string()))?;
    Ok(BlockRowMatrix::from_dense(&dense, block_rows)?)
}

pub fn dump_matrix(path: &Path, a: &BlockRowMatrix) -> Result<(), BenchError> {
    write_matrix(a, BufWriter::new(File::create(path)?))
}

pub fn load_matrix(path: &Path, block_rows: usize) -> Result<BlockRowMatrix, BenchError> {
    read_matrix(BufReader::new(File::open(path)?), block_rows)
}
