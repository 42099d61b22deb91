use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{factor_over_z, IntPolynomial};
use crate::arith::{fp_poly, primes_up_to_with};
use crate::exec::Executor;
use crate::numeric::{least_squares_slope, ln, NeumaierSum};
use crate::{Error, Result};

/// Primes up to this bound are handled by scanning all residues.
pub const SCAN_LIMIT: u64 = 10_000;

const PRIMES_PER_CHUNK: usize = 4096;

fn reduced_or_vanishing(f: &IntPolynomial, p: u64) -> Result<fp_poly::Poly> {
    let fp = f.reduce_mod(p);
    if fp.is_empty() {
        return Err(Error::VanishesModP(p));
    }
    Ok(fp)
}

/// eta_f(p) by evaluating at every residue.
pub fn zeros_mod_p_by_scan(f: &IntPolynomial, p: u64) -> Result<u64> {
    let fp = reduced_or_vanishing(f, p)?;
    Ok(fp_poly::count_zeros_by_scan(&fp, p))
}

/// eta_f(p) as `deg gcd(f, X^p - X)` in `F_p[X]`.
pub fn zeros_mod_p_by_gcd(f: &IntPolynomial, p: u64) -> Result<u64> {
    let fp = reduced_or_vanishing(f, p)?;
    if fp.len() == 1 {
        return Ok(0);
    }
    Ok(fp_poly::degree(&fp_poly::linear_part(&fp, p)).unwrap_or(0) as u64)
}

/// Number of distinct residues `l` in `[0, p)` with `f(l) = 0 mod p`.
///
/// Fails with [`Error::VanishesModP`] when every coefficient of `f` is
/// divisible by `p`.
pub fn zeros_mod_p(f: &IntPolynomial, p: u64) -> Result<u64> {
    if p <= SCAN_LIMIT {
        zeros_mod_p_by_scan(f, p)
    } else {
        zeros_mod_p_by_gcd(f, p)
    }
}

/// The sorted zero set of `f` modulo `p`.
pub fn root_residues(f: &IntPolynomial, p: u64) -> Result<Vec<u64>> {
    let fp = reduced_or_vanishing(f, p)?;
    if fp.len() == 1 {
        return Ok(Vec::new());
    }
    if p <= SCAN_LIMIT {
        return Ok((0..p).filter(|&a| fp_poly::eval(&fp, a, p) == 0).collect());
    }
    let lin = fp_poly::linear_part(&fp, p);
    Ok(fp_poly::split_linear_roots(&lin, p))
}

/// Determinant by Bareiss fraction-free elimination.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> BigInt {
    let m = f.degree().unwrap();
    let n = g.degree().unwrap();
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = alloc::vec![BigInt::zero(); size];
        for (k, c) in f.coeffs().iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = alloc::vec![BigInt::zero(); size];
        for (k, c) in g.coeffs().iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    bareiss_determinant(rows)
}

/// `(-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPolynomial) -> Result<BigInt> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::domain("discriminant needs degree at least 1")),
    };
    let res = resultant(f, &f.derivative());
    let (q, r) = res.div_rem(f.leading().unwrap());
    debug_assert!(r.is_zero());
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -q } else { q })
}

/// One sample of the weighted zero-count statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerRow {
    pub t: u64,
    /// `sum_{p <= t} eta_f(p) log p / p`
    pub statistic: f64,
    /// `statistic - h log t`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerReport {
    /// Distinct irreducible factors of `f` over `Z`.
    pub h: usize,
    pub rows: Vec<KroneckerRow>,
    /// Least-squares slope of the statistic against `log t` over the rows.
    pub slope: Option<f64>,
    pub slope_error: Option<f64>,
    /// `max |S(p) - h log p|` over every prime `p <= max t`.
    pub max_residual: f64,
    /// Primes dividing every coefficient; they contribute nothing.
    pub vanishing_primes: Vec<u64>,
}

/// Tabulates `S(t) = sum_{p <= t} eta_f(p) log p / p` at each sample point
/// and fits its slope against `log t`.
pub fn kronecker_statistic<E: Executor>(
    exec: &E,
    f: &IntPolynomial,
    samples: &[u64],
) -> Result<KroneckerReport> {
    if f.is_constant() {
        return Err(Error::domain("the zero-count statistic needs a nonconstant polynomial"));
    }
    let samples = crate::numeric::sorted_unique(samples);
    let x = *samples
        .last()
        .ok_or_else(|| Error::domain("no sample points"))?;
    if x > 100_000_000 {
        return Err(Error::SizeCap("sample points above 10^8".into()));
    }
    let h = factor_over_z(f)?.h();
    let primes = primes_up_to_with(exec, x)?;
    let primes = primes.as_slice();

    // eta per prime; None marks a prime dividing all coefficients
    let etas: Vec<Vec<Option<u64>>> =
        exec.map_chunks(primes.len().div_ceil(PRIMES_PER_CHUNK), |c| {
            let lo = c * PRIMES_PER_CHUNK;
            let hi = (lo + PRIMES_PER_CHUNK).min(primes.len());
            primes[lo..hi].iter().map(|&p| zeros_mod_p(f, p).ok()).collect()
        });

    let hf = h as f64;
    let mut acc = NeumaierSum::new();
    let mut rows = Vec::with_capacity(samples.len());
    let mut next_sample = samples.iter().peekable();
    let mut max_residual: f64 = 0.0;
    let mut vanishing_primes = Vec::new();
    let emit = |t: u64, value: f64, rows: &mut Vec<KroneckerRow>| {
        rows.push(KroneckerRow {
            t,
            statistic: value,
            residual: value - hf * ln(t as f64),
        });
    };
    for (&p, eta) in primes.iter().zip(etas.iter().flatten()) {
        while let Some(&&t) = next_sample.peek() {
            if t < p {
                emit(t, acc.value(), &mut rows);
                next_sample.next();
            } else {
                break;
            }
        }
        match eta {
            Some(eta) => {
                let pf = p as f64;
                acc.add(*eta as f64 * ln(pf) / pf);
            }
            None => vanishing_primes.push(p),
        }
        max_residual = max_residual.max((acc.value() - hf * ln(p as f64)).abs());
    }
    for &t in next_sample {
        emit(t, acc.value(), &mut rows);
    }

    let xs: Vec<f64> = rows.iter().map(|r| ln(r.t as f64)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.statistic).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok(KroneckerReport {
        h,
        slope_error: slope.map(|s| (s - hf).abs()),
        slope,
        rows,
        max_residual,
        vanishing_primes,
    })
}
