use alloc::vec;
use alloc::vec::Vec;

use crate::exec::{chunk_count, Executor, Sequential};
use crate::{Error, Result};

/// Width of one sieve segment (integers, not bytes).
const SEGMENT: u64 = 1 << 18;

/// All primes up to `limit`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// Membership for `n <= limit`.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// pi(t) for `t <= limit`.
    pub fn count_up_to(&self, t: u64) -> usize {
        self.primes.partition_point(|&p| p <= t)
    }

    /// Primes in the half-open interval `(lo, hi]`.
    pub fn in_range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p <= lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

/// Plain sieve of Eratosthenes; used for the base primes up to sqrt(limit).
fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi)` given every prime up to `sqrt(hi)` in `base`.
pub fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut start = lo.div_ceil(p) * p;
        if start < p * p {
            start = p * p;
        }
        let mut j = start;
        while j < hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|&(i, &c)| !c && lo + i as u64 >= 2)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// All primes up to `limit` by a segmented sieve.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    primes_up_to_with(&Sequential, limit)
}

/// As [`primes_up_to`], sieving segments through `exec`.
pub fn primes_up_to_with<E: Executor>(exec: &E, limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyRange(limit));
    }
    let base = simple_sieve(limit.isqrt());
    let end = limit + 1;
    let chunks = chunk_count(end, SEGMENT);
    let parts = exec.map_chunks(chunks, |c| {
        let lo = c as u64 * SEGMENT;
        let hi = (lo + SEGMENT).min(end);
        sieve_segment(lo, hi, &base)
    });
    let primes = parts.into_iter().flatten().collect();
    Ok(PrimeTable { limit, primes })
}

/// Smallest-prime-factor table for `1..=limit` (entry 1 is 1, entry 0 is 0).
#[derive(Debug, Clone)]
pub struct SmallestFactorTable {
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl SmallestFactorTable {
    /// Linear sieve; `limit` must fit in `u32`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit > u32::MAX as u64 {
            return Err(Error::SizeCap(alloc::format!(
                "smallest-factor table limit {limit} exceeds u32"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u64> = Vec::new();
        if n >= 1 {
            spf[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i] as u64;
            for &p in &primes {
                if p > si || p as usize * i > n {
                    break;
                }
                spf[p as usize * i] = p as u32;
            }
        }
        Ok(SmallestFactorTable { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn smallest_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    /// Calls `visit(p, e)` for each prime power exactly dividing `n`, in
    /// increasing order of `p`.
    pub fn for_each_prime_power(&self, mut n: u64, mut visit: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            visit(p, e);
        }
    }
}
