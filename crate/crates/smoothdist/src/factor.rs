//! Sieve-built table of the largest and smallest prime factor of every
//! integer up to a limit.
//!
//! Construction is a segmented sieve: primes up to `sqrt(limit)` are found
//! first, then each segment strips those primes from its residents while
//! recording the first (smallest) and last (largest) small prime seen. Any
//! cofactor left over after stripping is a prime above `sqrt(limit)` and is
//! by definition the largest prime factor. Each integer is touched once per
//! prime dividing it, plus one division per prime power. Segments are
//! independent, so construction parallelizes over them; the result does not
//! depend on the thread count.
//!
//! Memory is two `u32` words per integer, so the documented ceiling
//! [`MAX_LIMIT`] = 10^8 costs about 800 MB.
//!
//! # Cache format
//!
//! [`FactorTable::write_cache`] emits a portable little-endian binary image:
//!
//! ```text
//! magic    4 bytes   "SMFT"
//! version  u32 LE    currently 1
//! limit    u64 LE
//! largest  (limit+1) x u32 LE   entries for n = 0..=limit (entry 0 is 0)
//! smallest (limit+1) x u32 LE
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::primes::primes_up_to;

/// Hard table ceiling: two u32 arrays at 10^8 entries is ~800 MB.
pub const MAX_LIMIT: u64 = 100_000_000;

const CACHE_MAGIC: &[u8; 4] = b"SMFT";
const CACHE_VERSION: u32 = 1;
const SEGMENT: usize = 1 << 15;

/// Largest/smallest prime factor of every `n <= limit`.
///
/// Conventions: `largest(1) = smallest(1) = 1` (the empty product has no
/// prime factors, and 1 counts as y-smooth for every y >= 1); for a prime p,
/// `largest(p) = smallest(p) = p`.
///
/// The table is immutable after construction and safe to share across
/// threads.
pub struct FactorTable {
    limit: u64,
    largest: Vec<u32>,
    smallest: Vec<u32>,
}

impl FactorTable {
    /// Sieve a fresh table covering `2 ..= limit`.
    pub fn build(limit: u64) -> Result<Self> {
        if !(2..=MAX_LIMIT).contains(&limit) {
            return Err(Error::Capacity {
                context: "factor table build",
                requested: limit,
                limit: MAX_LIMIT,
            });
        }
        let n = limit as usize + 1;
        let mut largest = vec![0u32; n];
        let mut smallest = vec![0u32; n];
        let small_primes: Vec<usize> = primes_up_to(isqrt(limit))
            .into_iter()
            .map(|p| p as usize)
            .collect();

        largest
            .par_chunks_mut(SEGMENT)
            .zip(smallest.par_chunks_mut(SEGMENT))
            .enumerate()
            .for_each_init(
                || vec![0u32; SEGMENT],
                |remaining, (seg, (lseg, sseg))| {
                    let lo = seg * SEGMENT;
                    let len = lseg.len();
                    for (i, r) in remaining[..len].iter_mut().enumerate() {
                        *r = (lo + i) as u32;
                    }
                    for &p in &small_primes {
                        if p >= lo + len {
                            break;
                        }
                        // first multiple of p in the segment, never below p itself
                        let mut m = p.max(lo.div_ceil(p) * p);
                        while m < lo + len {
                            let i = m - lo;
                            if sseg[i] == 0 {
                                sseg[i] = p as u32;
                            }
                            lseg[i] = p as u32;
                            let mut r = remaining[i];
                            let pw = p as u32;
                            while r % pw == 0 {
                                r /= pw;
                            }
                            remaining[i] = r;
                            m += p;
                        }
                    }
                    for i in 0..len {
                        // leftover cofactor is a prime above sqrt(limit)
                        let r = remaining[i];
                        if r > 1 {
                            lseg[i] = r;
                            if sseg[i] == 0 {
                                sseg[i] = r;
                            }
                        }
                    }
                },
            );

        largest[1] = 1;
        smallest[1] = 1;
        Ok(FactorTable {
            limit,
            largest,
            smallest,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// P(n), the largest prime factor. Panics if `n` is 0 or above the limit;
    /// fallible operations validate their range before looping over the table.
    #[inline]
    pub fn largest(&self, n: u64) -> u64 {
        debug_assert!(n >= 1 && n <= self.limit);
        self.largest[n as usize] as u64
    }

    /// p1(n), the smallest prime factor.
    #[inline]
    pub fn smallest(&self, n: u64) -> u64 {
        debug_assert!(n >= 1 && n <= self.limit);
        self.smallest[n as usize] as u64
    }

    #[inline]
    pub fn is_smooth(&self, n: u64, y: u64) -> bool {
        self.largest(n) <= y
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.largest(n) == n
    }

    /// True iff `n = p^k` for a prime p and k >= 1.
    #[inline]
    pub fn is_prime_power(&self, n: u64) -> bool {
        n >= 2 && self.largest[n as usize] == self.smallest[n as usize]
    }

    /// Von Mangoldt Λ(n): `log p` at prime powers `p^k`, zero elsewhere.
    #[inline]
    pub fn mangoldt(&self, n: u64) -> f64 {
        if self.is_prime_power(n) {
            (self.smallest(n) as f64).ln()
        } else {
            0.0
        }
    }

    /// Ensure `x <= limit`, as a capacity error naming the failing operation.
    pub fn check_capacity(&self, context: &'static str, x: u64) -> Result<()> {
        if x > self.limit {
            Err(Error::Capacity {
                context,
                requested: x,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Write the binary cache image described in the module docs.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let to_io = |e| Error::io(path, e);
        w.write_all(CACHE_MAGIC).map_err(to_io)?;
        w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(to_io)?;
        w.write_all(&self.limit.to_le_bytes()).map_err(to_io)?;
        write_u32s(&mut w, &self.largest).map_err(to_io)?;
        write_u32s(&mut w, &self.smallest).map_err(to_io)?;
        w.flush().map_err(to_io)
    }

    /// Read a cache image back, validating magic, version and length.
    pub fn read_cache(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |reason: &str| Error::Cache {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
        if &magic != CACHE_MAGIC {
            return Err(bad("wrong magic bytes"));
        }
        let mut v = [0u8; 4];
        r.read_exact(&mut v).map_err(|e| Error::io(path, e))?;
        if u32::from_le_bytes(v) != CACHE_VERSION {
            return Err(bad("unsupported cache version"));
        }
        let mut l = [0u8; 8];
        r.read_exact(&mut l).map_err(|e| Error::io(path, e))?;
        let limit = u64::from_le_bytes(l);
        if !(2..=MAX_LIMIT).contains(&limit) {
            return Err(bad("limit out of range"));
        }
        let n = limit as usize + 1;
        let largest = read_u32s(&mut r, n).map_err(|e| Error::io(path, e))?;
        let smallest = read_u32s(&mut r, n).map_err(|e| Error::io(path, e))?;
        let mut trailing = [0u8; 1];
        match r.read(&mut trailing) {
            Ok(0) => {}
            Ok(_) => return Err(bad("trailing bytes after arrays")),
            Err(e) => return Err(Error::io(path, e)),
        }
        Ok(FactorTable {
            limit,
            largest,
            smallest,
        })
    }

    /// Reuse a cache when it covers `limit`; otherwise build and, if a path
    /// was given, save for next time. A cached table larger than requested is
    /// kept as-is.
    pub fn load_or_build(limit: u64, cache: Option<&Path>) -> Result<Self> {
        if let Some(path) = cache {
            if path.exists() {
                let table = Self::read_cache(path)?;
                if table.limit >= limit {
                    return Ok(table);
                }
            }
            let table = Self::build(limit)?;
            table.write_cache(path)?;
            return Ok(table);
        }
        Self::build(limit)
    }
}

fn write_u32s<W: Write>(w: &mut W, data: &[u32]) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(SEGMENT * 4);
    for chunk in data.chunks(SEGMENT) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_u32s<R: Read>(r: &mut R, n: usize) -> std::io::Result<Vec<u32>> {
    let mut out = Vec::with_capacity(n);
    let mut buf = vec![0u8; SEGMENT * 4];
    let mut left = n;
    while left > 0 {
        let take = left.min(SEGMENT);
        let bytes = &mut buf[..take * 4];
        r.read_exact(bytes)?;
        for quad in bytes.chunks_exact(4) {
            out.push(u32::from_le_bytes(quad.try_into().unwrap()));
        }
        left -= take;
    }
    Ok(out)
}
