//! Path serialization.
//!
//! CSV: header `j,t_j,value`, one row per grid point.
//!
//! Binary (all little-endian):
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 8     | magic `WSPATH01`                        |
//! | 1     | kind (0 = fBm, 1 = Bm)                  |
//! | 1     | method (0 = Cholesky, 1 = Circulant, 2 = Independent) |
//! | 8     | n (u64)                                 |
//! | 8     | horizon T (f64)                         |
//! | 8     | master seed (u64)                       |
//! | 8     | stream id (u64)                         |
//! | 8     | value count (u64)                       |
//! | 8·k   | values (f64)                            |

use std::io::{Read, Write};

use super::{Grid, Path, PathKind, SamplingMethod};
use crate::error::{Error, Result};
use crate::rng::SeedPolicy;

const MAGIC: &[u8; 8] = b"WSPATH01";

pub fn write_csv<W: Write>(path: &Path, mut out: W) -> Result<()> {
    writeln!(out, "j,t_j,value")?;
    for (j, v) in path.values().iter().enumerate() {
        writeln!(out, "{j},{},{v}", path.grid().time(j))?;
    }
    Ok(())
}

pub fn write_binary<W: Write>(path: &Path, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    let kind = match path.kind() {
        PathKind::Fbm => 0u8,
        PathKind::Bm => 1,
    };
    let method = match path.method() {
        SamplingMethod::Cholesky => 0u8,
        SamplingMethod::Circulant => 1,
        SamplingMethod::Independent => 2,
    };
    out.write_all(&[kind, method])?;
    out.write_all(&path.grid().n().to_le_bytes())?;
    out.write_all(&path.grid().horizon().to_le_bytes())?;
    out.write_all(&path.seeds().master_seed.to_le_bytes())?;
    out.write_all(&path.seeds().stream_id.to_le_bytes())?;
    out.write_all(&(path.values().len() as u64).to_le_bytes())?;
    for v in path.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Path> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a path dump (bad magic)".into()));
    }
    let mut tags = [0u8; 2];
    input.read_exact(&mut tags)?;
    let kind = match tags[0] {
        0 => PathKind::Fbm,
        1 => PathKind::Bm,
        k => return Err(Error::Parse(format!("unknown path kind {k}"))),
    };
    let method = match tags[1] {
        0 => SamplingMethod::Cholesky,
        1 => SamplingMethod::Circulant,
        2 => SamplingMethod::Independent,
        k => return Err(Error::Parse(format!("unknown sampling method {k}"))),
    };
    let n = read_u64(&mut input)?;
    let horizon = f64::from_bits(read_u64(&mut input)?);
    let seeds = SeedPolicy::new(read_u64(&mut input)?, read_u64(&mut input)?);
    let count = read_u64(&mut input)? as usize;
    let grid = Grid::new(n, horizon)?;
    if count != grid.m() + 1 {
        return Err(Error::Parse(format!("value count {count} inconsistent with grid")));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_bits(read_u64(&mut input)?));
    }
    Path::from_values(grid, values, kind, seeds, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_bm, sample_fbm};

    #[test]
    fn csv_layout() {
        let grid = Grid::unit(2).unwrap();
        let p = Path::from_values(
            grid,
            vec![0.0, 0.5, -0.25],
            PathKind::Bm,
            SeedPolicy::new(1, 1),
            SamplingMethod::Independent,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "j,t_j,value\n0,0,0\n1,0.5,0.5\n2,1,-0.25\n");
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let grid = Grid::new(32, 0.5).unwrap();
        let seeds = SeedPolicy::new(12, 34);
        for p in [sample_fbm(grid, seeds, SamplingMethod::Circulant).unwrap(), sample_bm(grid, seeds)] {
            let mut buf = Vec::new();
            write_binary(&p, &mut buf).unwrap();
            assert_eq!(buf.len(), 8 + 2 + 5 * 8 + 8 * 17);
            let q = read_binary(&buf[..]).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn binary_rejects_garbage() {
        assert!(read_binary(&b"NOTAPATHxx"[..]).is_err());
        assert!(read_binary(&b"WSPATH01"[..]).is_err());
    }
}
