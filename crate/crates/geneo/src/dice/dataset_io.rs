//! Binary dataset format, little-endian throughout:
//! magic `"GDIE"`, `u32` version (1), `u32` n, `u32` count,
//! `u32` surface_len, then per record `u8` label (1|2), `u64` per-die seed,
//! `f32[surface_len]` values.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dice::sample::DieSample;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"GDIE";
const VERSION: u32 = 1;

/// A dataset together with the lattice side it was generated on.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub n: usize,
    pub samples: Vec<DieSample>,
}

fn expected_surface_len(n: usize) -> usize {
    n * n * n - (n - 2) * (n - 2) * (n - 2)
}

pub fn write_dataset(path: &Path, n: usize, samples: &[DieSample]) -> Result<()> {
    let surface_len = expected_surface_len(n);
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(samples.len() as u32).to_le_bytes())?;
    w.write_all(&(surface_len as u32).to_le_bytes())?;
    for die in samples {
        if die.surface_values.len() != surface_len {
            return Err(Error::InvalidInput(format!(
                "sample has {} values, expected {surface_len}",
                die.surface_values.len()
            )));
        }
        w.write_all(&[die.label])?;
        w.write_all(&die.seed.to_le_bytes())?;
        for v in &die.surface_values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidInput("bad dataset magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported dataset version {version}"
        )));
    }
    let n = read_u32(&mut r)? as usize;
    let count = read_u32(&mut r)? as usize;
    let surface_len = read_u32(&mut r)? as usize;
    if n < 2 || surface_len != expected_surface_len(n) {
        return Err(Error::InvalidInput(format!(
            "surface length {surface_len} does not match lattice side {n}"
        )));
    }
    let mut samples = Vec::with_capacity(count);
    let mut buf = vec![0u8; surface_len * 4];
    for _ in 0..count {
        let mut label = [0u8; 1];
        r.read_exact(&mut label)?;
        if label[0] != 1 && label[0] != 2 {
            return Err(Error::InvalidInput(format!("bad label {}", label[0])));
        }
        let mut seed = [0u8; 8];
        r.read_exact(&mut seed)?;
        r.read_exact(&mut buf)?;
        let surface_values = buf
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        samples.push(DieSample {
            label: label[0],
            seed: u64::from_le_bytes(seed),
            surface_values,
        });
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::InvalidInput("trailing bytes after last record".into()));
    }
    Ok(Dataset { n, samples })
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}
