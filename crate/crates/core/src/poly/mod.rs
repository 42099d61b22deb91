//! Integer polynomials: arithmetic, factorization over `Z`, discriminants,
//! zero counts modulo primes, and the weighted zero-count statistic
//! `sum_{p <= t} eta_f(p) log p / p`.

mod factor;
mod zeros;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{fp_poly, reduce_bigint};

pub use factor::{factor_over_z, FactorizationZ, MAX_FACTOR_DEGREE};
pub use zeros::{
    discriminant, kronecker_statistic, root_residues, zeros_mod_p, zeros_mod_p_by_gcd,
    zeros_mod_p_by_scan, KroneckerReport, KroneckerRow, SCAN_LIMIT,
};

/// Dense polynomial with exact integer coefficients, low-to-high.
///
/// The zero polynomial has no coefficients; every other value has a
/// nonzero last coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(alloc::vec![c])
    }

    /// The polynomial `X`.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `X + a`.
    pub fn linear_shift(a: i64) -> Self {
        Self::from_i64s(&[a, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True for the zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, at: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * at + c)
    }

    pub fn eval_u64(&self, n: u64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// Value at `n` if every intermediate fits an `i128`.
    pub fn eval_i128(&self, n: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(n)?.checked_add(c.to_i128()?)?;
        }
        Some(acc)
    }

    /// `f(n) mod m` with the least non-negative residue.
    pub fn eval_mod(&self, n: u64, m: u64) -> u64 {
        let n = n % m;
        self.coeffs.iter().rev().fold(0u64, |acc, c| {
            let t = (acc as u128 * n as u128 + reduce_bigint(c, m) as u128) % m as u128;
            t as u64
        })
    }

    /// Reduction into `F_p[X]`.
    pub fn reduce_mod(&self, p: u64) -> fp_poly::Poly {
        fp_poly::trim(self.coeffs.iter().map(|c| reduce_bigint(c, p)).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Nonnegative gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// `self / content`, with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = alloc::vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Exact quotient in `Z[X]`, or `None` if `divisor` does not divide
    /// `self` there.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let ds = self.degree().unwrap();
        if ds < dd {
            return None;
        }
        let lead = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = alloc::vec![BigInt::zero(); ds - dd + 1];
        for i in (dd..=ds).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let (q, r) = rem[i].div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &q * c;
            }
            quot[i - dd] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }

    /// Pseudo-remainder `lc(g)^(deg f - deg g + 1) f mod g`.
    fn pseudo_rem(&self, g: &Self) -> Self {
        let dg = g.degree().expect("pseudo-remainder by zero");
        let lead = g.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dg {
                break;
            }
            let c = r.leading().unwrap().clone();
            let mut shifted = alloc::vec![BigInt::zero(); dr - dg];
            shifted.extend(g.coeffs.iter().map(|a| a * &c));
            r = r.scale(&lead).sub(&Self::new(shifted));
        }
        r
    }

    /// Primitive gcd over `Z[X]` with positive leading coefficient, via the
    /// primitive remainder sequence. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            core::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part() };
        }
        a.primitive_part()
    }

    /// One term `c X^k` without its sign.
    fn term_string(c: &BigInt, k: usize) -> String {
        let mag = c.abs();
        let coeff = if mag.is_one() && k > 0 {
            String::new()
        } else {
            alloc::format!("{mag}")
        };
        match k {
            0 => coeff,
            1 => alloc::format!("{coeff}X"),
            _ => alloc::format!("{coeff}X^{k}"),
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.sign() == Sign::Minus;
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            write!(f, "{}", Self::term_string(c, k))?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    #[test]
    fn normalization_and_degree() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
        assert!(p(&[5]).is_constant());
    }

    #[test]
    fn arithmetic() {
        let a = p(&[-1, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(p(&[-1, 0, 1]).exact_div(&a), Some(b.clone()));
        assert_eq!(p(&[1, 0, 1]).exact_div(&a), None);
        assert_eq!(p(&[0, 0, 2]).exact_div(&p(&[0, 3])), None);
        assert_eq!(p(&[6, 0, -6]).content(), BigInt::from(6));
        assert_eq!(p(&[6, 0, -6]).primitive_part(), p(&[-1, 0, 1]));
        assert_eq!(p(&[1, 2, 3]).derivative(), p(&[2, 6]));
    }

    #[test]
    fn gcd_over_z() {
        let f = p(&[-1, 0, 0, 0, 1]); // X^4 - 1
        let g = p(&[2, 0, 2]).mul(&p(&[3, 1])); // 2(X^2+1)(X+3)
        assert_eq!(f.gcd(&g), p(&[1, 0, 1]));
        assert_eq!(f.gcd(&IntPolynomial::zero()), f);
        assert_eq!(p(&[3]).gcd(&p(&[0, 1])), IntPolynomial::one());
    }

    #[test]
    fn evaluation() {
        let f = p(&[1, 0, 1]);
        assert_eq!(f.eval_u64(3), BigInt::from(10));
        assert_eq!(f.eval_mod(2, 5), 0);
        assert_eq!(p(&[-7, 1]).eval_mod(3, 5), 1);
        assert_eq!(f.eval_i128(1 << 40), Some((1i128 << 80) + 1));
        assert_eq!(f.eval_i128(1 << 70), None);
        assert_eq!(f.reduce_mod(5), alloc::vec![1, 0, 1]);
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", p(&[1, 0, -3, 1])), "X^3 - 3X^2 + 1");
        assert_eq!(alloc::format!("{}", p(&[0, -1])), "-X");
        assert_eq!(alloc::format!("{}", IntPolynomial::zero()), "0");
    }
}
