//! Binary cache of sieved primes.
//!
//! Layout (little endian): magic `SLBSIEVE`, `u32` format version, `u64`
//! limit, `u64` prime count, then the primes as `u32`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::ArithTables;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SLBSIEVE";
const VERSION: u32 = 1;

pub fn save_cache(tables: &ArithTables, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&tables.limit().to_le_bytes())?;
    w.write_all(&(tables.primes().len() as u64).to_le_bytes())?;
    for &p in tables.primes() {
        w.write_all(&p.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Load tables for `limit` from a cache written with a limit of at least `limit`.
pub fn load_cache(path: &Path, limit: u64) -> Result<ArithTables> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache("not a sieve cache file".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Cache(format!(
            "format version {version}, expected {VERSION}"
        )));
    }
    let cached_limit = read_u64(&mut r)?;
    if cached_limit < limit {
        return Err(Error::Cache(format!(
            "cache covers {cached_limit}, need {limit}"
        )));
    }
    let count = read_u64(&mut r)? as usize;
    let mut bytes = vec![0u8; count * 4];
    r.read_exact(&mut bytes)?;
    let primes: Vec<u32> = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .take_while(|&p| p as u64 <= limit)
        .collect();
    ArithTables::from_primes(limit, primes)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        let t = build_tables(5000).unwrap();
        save_cache(&t, &path).unwrap();
        let back = load_cache(&path, 3000).unwrap();
        assert_eq!(back.primes(), t.primes_upto(3000.0));
        assert!(load_cache(&path, 6000).is_err());
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bin");
        std::fs::write(&path, b"NOTACACHE.......").unwrap();
        assert!(matches!(load_cache(&path, 10), Err(Error::Cache(_))));
    }
}
