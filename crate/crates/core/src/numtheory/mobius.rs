use rayon::prelude::*;

use crate::error::{Error, Result};

/// Segment length of the sieve.
pub const BLOCK: usize = 1 << 16;
pub const MAX_LIMIT: usize = 100_000_000;

/// `mu(n)` for `1 <= n <= limit`.
#[derive(Clone, Debug)]
pub struct MobiusTable {
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    /// `mu(n)`; `n = 0` maps to 0.
    pub fn get(&self, n: usize) -> i8 {
        self.values[n]
    }

    /// Slice indexed by `n`, with a 0 at index 0.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// `M(n) = sum_{m <= n} mu(m)`.
    pub fn mertens(&self, n: usize) -> i64 {
        self.values[1..=n].iter().map(|&v| v as i64).sum()
    }
}

fn small_primes(n: usize) -> Vec<u64> {
    let mut comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Segmented Möbius sieve.
pub fn mobius_sieve(n: usize) -> Result<MobiusTable> {
    if n == 0 || n > MAX_LIMIT {
        return Err(Error::Range(format!("sieve limit {n} outside 1..={MAX_LIMIT}")));
    }
    let mut values: Vec<i8> = Vec::new();
    values
        .try_reserve_exact(n + 1)
        .map_err(|e| Error::Capacity(format!("{} bytes for the Möbius table: {e}", n + 1)))?;
    values.resize(n + 1, 0);
    let root = (n as f64).sqrt() as usize + 1;
    let primes = small_primes(root);
    values.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        let lo = (b * BLOCK) as u64;
        let mut rem: Vec<u64> = (0..chunk.len() as u64).map(|i| lo + i).collect();
        chunk.iter_mut().for_each(|v| *v = 1);
        let hi = lo + chunk.len() as u64;
        for &p in &primes {
            if p >= hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                chunk[i] = -chunk[i];
                rem[i] /= p;
                m += p;
            }
            let pp = p * p;
            let mut m = lo.div_ceil(pp) * pp;
            while m < hi {
                chunk[(m - lo) as usize] = 0;
                m += pp;
            }
        }
        for (i, v) in chunk.iter_mut().enumerate() {
            if rem[i] > 1 {
                *v = -*v;
            }
        }
        if lo == 0 {
            chunk[0] = 0;
        }
    });
    Ok(MobiusTable { values })
}
