//! Prime tuples: admissibility, exact tuple counts, the singular series, and
//! the quotient problem `prod (2^(n + n_i) - 2) / prod (n + n_i)` whose set
//! contains every `n` with all `n + n_i` prime.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::QuotientProblem;
use crate::arith::{is_prime, primes_up_to};
use crate::numeric::NeumaierSum;
use crate::poly::IntPolynomial;
use crate::recurrence::{ExpPolyRecurrence, ExpTerm};
use crate::sieve::{sieved_count, SieveSystem};
use crate::{Error, Executor, Result};

/// Largest tuple length for [`hl_family`].
pub const MAX_HL_H: usize = 4;
/// Largest `x + max(tuple)` for [`hl_count`].
pub const MAX_HL_X: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// A prime whose residue classes are all met by the tuple.
    pub witness: Option<u64>,
}

fn check_tuple(tuple: &[u64]) -> Result<()> {
    if tuple.is_empty() {
        return Err(Error::domain("the tuple is empty"));
    }
    if tuple.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("the tuple must be strictly increasing"));
    }
    Ok(())
}

/// Distinct residues of the tuple modulo `p`.
fn residue_count(tuple: &[u64], p: u64) -> u64 {
    let mut r: Vec<u64> = tuple.iter().map(|&n| n % p).collect();
    r.sort_unstable();
    r.dedup();
    r.len() as u64
}

/// Only primes `p <= h` can be covered by `h` residues.
pub fn admissible(tuple: &[u64]) -> Result<Admissibility> {
    check_tuple(tuple)?;
    let h = tuple.len() as u64;
    let witness = (2..=h).filter(|&p| is_prime(p)).find(|&p| residue_count(tuple, p) == p);
    Ok(Admissibility {
        admissible: witness.is_none(),
        witness,
    })
}

/// `#{ 1 <= n <= x : n + n_i prime for every i }`.
pub fn hl_count(tuple: &[u64], x: u64) -> Result<u64> {
    check_tuple(tuple)?;
    let top = x
        .checked_add(*tuple.last().unwrap())
        .filter(|&t| t <= MAX_HL_X)
        .ok_or_else(|| Error::SizeCap("x + max(tuple) above 10^9".into()))?;
    if top < 2 {
        return Ok(0);
    }
    let primes = primes_up_to(top)?;
    let n0 = tuple[0];
    Ok(primes
        .iter()
        .filter(|&q| q > n0 && q - n0 <= x)
        .filter(|&q| tuple[1..].iter().all(|&ni| primes.contains(q - n0 + ni)))
        .count() as u64)
}

/// The same count through a residue sieve: survivors `n > z` of the sieve
/// `n + n_i != 0 mod p` for `p <= z = floor(sqrt(x + max))` are exactly the
/// tuples above `z`; `n <= z` are checked one by one.
pub fn hl_count_by_sieve<E: Executor>(exec: &E, tuple: &[u64], x: u64) -> Result<u64> {
    check_tuple(tuple)?;
    let top = x + tuple.last().unwrap();
    let z = num_integer::Roots::sqrt(&top).max(2);
    let g = tuple
        .iter()
        .fold(IntPolynomial::one(), |acc, &ni| acc.mul(&IntPolynomial::linear_shift(ni as i64)));
    let system = SieveSystem::build(&g, &[], &[], 1, z)?;
    let small = z.min(x);
    let above = sieved_count(exec, x, &system)? - sieved_count(exec, small, &system)?;
    let below = (1..=small)
        .filter(|&n| tuple.iter().all(|&ni| is_prime(n + ni)))
        .count() as u64;
    Ok(above + below)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularSeries {
    pub truncation: u64,
    /// `prod_{p <= P0} (1 - w(p)/p) (1 - 1/p)^(-h)`
    pub value: f64,
    /// Estimated relative truncation error, from the decay of the log
    /// factors on `(P0/2, P0]`.
    pub tail_bound: f64,
}

/// Truncated Hardy-Littlewood product with `w(p)` the number of residues of
/// the tuple modulo `p`.
pub fn singular_series(tuple: &[u64], truncation: u64) -> Result<SingularSeries> {
    let adm = admissible(tuple)?;
    if let Some(p) = adm.witness {
        return Err(Error::domain(format!("the tuple covers every class modulo {p}")));
    }
    let h = tuple.len() as f64;
    let mut log_sum = NeumaierSum::new();
    let mut decay: f64 = 0.0;
    if truncation >= 2 {
        for p in primes_up_to(truncation)?.iter() {
            let pf = p as f64;
            let w = residue_count(tuple, p) as f64;
            let term = libm::log1p(-w / pf) - h * libm::log1p(-1.0 / pf);
            log_sum.add(term);
            if 2 * p > truncation {
                decay = decay.max(pf * pf * libm::fabs(term));
            }
        }
    }
    let tail = if truncation >= 2 { decay / truncation as f64 } else { 0.0 };
    Ok(SingularSeries {
        truncation,
        value: libm::exp(log_sum.value()),
        tail_bound: libm::expm1(tail),
    })
}

/// Elementary symmetric polynomials `e_0, ..., e_h` of `values`.
fn elementary_symmetric(values: &[BigInt]) -> Vec<BigInt> {
    let mut e = alloc::vec![BigInt::one()];
    for v in values {
        let mut next = alloc::vec![BigInt::zero(); e.len() + 1];
        for (j, c) in e.iter().enumerate() {
            next[j] += c;
            next[j + 1] += c * v;
        }
        e = next;
    }
    e
}

/// `F(n) = prod_i (2^(n + n_i) - 2)` expanded in powers `(2^j)^n` and
/// `G = prod_i (X + n_i)`.
pub fn hl_family(tuple: &[u64]) -> Result<QuotientProblem> {
    check_tuple(tuple)?;
    let h = tuple.len();
    if h > MAX_HL_H {
        return Err(Error::SizeCap(format!("tuple length {h} above {MAX_HL_H}")));
    }
    if let Some(p) = admissible(tuple)?.witness {
        return Err(Error::domain(format!("the tuple covers every class modulo {p}")));
    }
    if tuple.last().is_some_and(|&m| m > i64::MAX as u64) {
        return Err(Error::domain("tuple entries must fit in i64"));
    }
    // prod (a_i X - 2) = sum_j e_j(a) (-2)^(h - j) X^j with X = 2^n
    let a: Vec<BigInt> = tuple.iter().map(|&ni| BigInt::one() << ni as usize).collect();
    let e = elementary_symmetric(&a);
    let terms = (0..=h)
        .map(|j| ExpTerm {
            poly: IntPolynomial::constant(&e[j] * num_traits::pow(BigInt::from(-2), h - j)),
            root: 1i64 << j,
        })
        .collect();
    let f = ExpPolyRecurrence::new(terms)?;
    let g = tuple
        .iter()
        .fold(IntPolynomial::one(), |acc, &ni| acc.mul(&IntPolynomial::linear_shift(ni as i64)));
    QuotientProblem::new(f.into(), g, &[])
}
