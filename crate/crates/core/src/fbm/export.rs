//! Binary path export: the magic `FBMPATH1`, then little-endian `u64`
//! fields `m`, `n`, `H` (as `f64` bits) and `seed`, then `m × (n+1)`
//! row-major `f64` levels.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fbm::sampler::FbmPathBatch;

pub const MAGIC: &[u8; 8] = b"FBMPATH1";

#[derive(Debug, Clone, PartialEq)]
pub struct PathFile {
    pub m: u64,
    pub n: u64,
    pub hurst: f64,
    pub seed: u64,
    pub levels: Vec<f64>,
}

pub fn write_paths<W: Write>(batch: &FbmPathBatch, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(batch.len() as u64).to_le_bytes())?;
    w.write_all(&(batch.grid.n as u64).to_le_bytes())?;
    w.write_all(&batch.grid.hurst.to_bits().to_le_bytes())?;
    w.write_all(&batch.seed.to_le_bytes())?;
    for x in batch.all_levels() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::PathFormat(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_paths<R: Read>(mut r: R) -> Result<PathFile> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|e| Error::PathFormat(format!("missing magic: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::PathFormat("bad magic".into()));
    }
    let m = read_u64(&mut r)?;
    let n = read_u64(&mut r)?;
    let hurst = f64::from_bits(read_u64(&mut r)?);
    let seed = read_u64(&mut r)?;
    let count = m
        .checked_mul(n + 1)
        .ok_or_else(|| Error::PathFormat("size overflow".into()))? as usize;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(Error::PathFormat(format!(
            "expected {} payload bytes, found {}",
            count * 8,
            bytes.len()
        )));
    }
    let levels = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(PathFile {
        m,
        n,
        hurst,
        seed,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_paths, FbmGrid, SamplingMethod};

    #[test]
    fn header_layout_is_exact() {
        let grid = FbmGrid::new(0.3, 4).unwrap();
        let batch = sample_paths(grid, 2, 5, SamplingMethod::Cholesky).unwrap();
        let mut buf = Vec::new();
        write_paths(&batch, &mut buf).unwrap();
        assert_eq!(&buf[..8], b"FBMPATH1");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(buf[24..32].try_into().unwrap()), 0.3f64.to_bits());
        assert_eq!(u64::from_le_bytes(buf[32..40].try_into().unwrap()), 5);
        assert_eq!(buf.len(), 40 + 2 * 5 * 8);
        let back = read_paths(&buf[..]).unwrap();
        assert_eq!(back.levels, batch.all_levels());
    }

    #[test]
    fn rejects_corrupt_files() {
        assert!(read_paths(&b"FBMPATH2"[..]).is_err());
        let mut buf = Vec::new();
        let grid = FbmGrid::new(0.3, 4).unwrap();
        write_paths(&sample_paths(grid, 1, 5, SamplingMethod::Cholesky).unwrap(), &mut buf).unwrap();
        buf.pop();
        assert!(read_paths(&buf[..]).is_err());
    }
}
