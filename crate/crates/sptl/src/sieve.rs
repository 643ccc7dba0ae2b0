//! Segmented prime sieve with a binary on-disk cache.
//!
//! Cache format: magic "SPTL1\0", little-endian u64 limit, u64 prime count,
//! u64 checksum, then u32 deltas between consecutive primes (first delta is
//! from 0). A checksum mismatch or truncated file triggers regeneration.

use crate::{Error, Result};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 6] = b"SPTL1\0";
const MAX_LIMIT: u64 = 200_000_000;
const SEGMENT: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    primes: Vec<u32>,
}

impl PrimeSieve {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// Cache directory from the environment, if configured.
pub fn env_cache_dir() -> Option<PathBuf> {
    std::env::var_os("SPTL_CACHE_DIR").map(PathBuf::from)
}

/// Builds (or loads from cache) all primes up to `limit`.
pub fn load_or_build(limit: u64, cache_dir: Option<&Path>) -> Result<PrimeSieve> {
    if limit < 2 || limit > MAX_LIMIT {
        return Err(Error::SieveRange(limit, MAX_LIMIT));
    }
    let file = cache_dir.map(|d| d.join(format!("primes_{limit}.bin")));
    if let Some(path) = &file {
        if let Some(s) = try_read_cache(path, limit) {
            return Ok(s);
        }
    }
    let primes = segmented_sieve(limit);
    let sieve = PrimeSieve { limit, primes };
    if let Some(path) = &file {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        write_cache(path, &sieve)?;
    }
    Ok(sieve)
}

fn checksum(deltas: &[u32]) -> u64 {
    // FNV-1a over the delta stream
    let mut h: u64 = 0xcbf29ce484222325;
    for &d in deltas {
        for b in d.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

fn try_read_cache(path: &Path, limit: u64) -> Option<PrimeSieve> {
    let data = std::fs::read(path).ok()?;
    if data.len() < 30 || &data[..6] != MAGIC {
        return None;
    }
    let rd_u64 = |off: usize| u64::from_le_bytes(data[off..off + 8].try_into().unwrap());
    if rd_u64(6) != limit {
        return None;
    }
    let count = rd_u64(14) as usize;
    let stored_sum = rd_u64(22);
    if data.len() != 30 + 4 * count {
        return None;
    }
    let mut deltas = Vec::with_capacity(count);
    for i in 0..count {
        deltas.push(u32::from_le_bytes(data[30 + 4 * i..34 + 4 * i].try_into().unwrap()));
    }
    if checksum(&deltas) != stored_sum {
        return None;
    }
    let mut primes = Vec::with_capacity(count);
    let mut cur = 0u32;
    for d in deltas {
        cur += d;
        primes.push(cur);
    }
    Some(PrimeSieve { limit, primes })
}

fn write_cache(path: &Path, sieve: &PrimeSieve) -> Result<()> {
    let mut deltas = Vec::with_capacity(sieve.primes.len());
    let mut prev = 0u32;
    for &p in &sieve.primes {
        deltas.push(p - prev);
        prev = p;
    }
    let mut out = Vec::with_capacity(30 + 4 * deltas.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&sieve.limit.to_le_bytes());
    out.extend_from_slice(&(deltas.len() as u64).to_le_bytes());
    out.extend_from_slice(&checksum(&deltas).to_le_bytes());
    for d in &deltas {
        out.extend_from_slice(&d.to_le_bytes());
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn segmented_sieve(limit: u64) -> Vec<u32> {
    let root = (limit as f64).sqrt() as usize + 2;
    // base sieve to sqrt(limit)
    let mut base = vec![true; root + 1];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut i = 2usize;
    while i * i <= root {
        if base[i] {
            let mut j = i * i;
            while j <= root {
                base[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    let base_primes: Vec<usize> = (2..=root).filter(|&n| base[n]).collect();

    let mut primes: Vec<u32> = Vec::with_capacity((limit as f64 / (limit as f64).ln() * 1.15) as usize);
    for p in &base_primes {
        if (*p as u64) <= limit {
            primes.push(*p as u32);
        }
    }
    let mut lo = (root + 1) as u64;
    let mut flags = vec![true; SEGMENT];
    while lo <= limit {
        let hi = (lo + SEGMENT as u64 - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        flags[..len].fill(true);
        for &p in &base_primes {
            let p = p as u64;
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = (start - lo) as usize;
            while j < len {
                flags[j] = false;
                j += p as usize;
            }
        }
        for (j, &f) in flags[..len].iter().enumerate() {
            if f {
                primes.push((lo + j as u64) as u32);
            }
        }
        lo = hi + 1;
    }
    primes
}
