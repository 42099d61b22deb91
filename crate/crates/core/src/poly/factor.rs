use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::IntPolynomial;
use crate::arith::factorize;
use crate::{Error, Result};

/// Largest degree accepted by [`factor_over_z`].
pub const MAX_FACTOR_DEGREE: usize = 8;

/// `content * prod factor^multiplicity`, with every factor primitive,
/// irreducible over `Q`, nonconstant and with positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationZ {
    pub content: BigInt,
    pub factors: Vec<(IntPolynomial, u32)>,
}

impl FactorizationZ {
    /// Number of distinct nonconstant irreducible factors.
    pub fn h(&self) -> usize {
        self.factors.len()
    }

    /// Multiply everything back together.
    pub fn expand(&self) -> IntPolynomial {
        self.factors
            .iter()
            .fold(IntPolynomial::constant(self.content.clone()), |acc, (f, e)| {
                acc.mul(&f.pow(*e))
            })
    }
}

/// Factors a nonzero integer polynomial of degree at most 8 into content and
/// primitive irreducibles.
///
/// The squarefree part `f / gcd(f, f')` is split by pulling out rational
/// roots and then searching for factors of each degree `d <= n/2` by
/// Kronecker's interpolation method; multiplicities are recovered by
/// repeated exact division.
pub fn factor_over_z(f: &IntPolynomial) -> Result<FactorizationZ> {
    let degree = f
        .degree()
        .ok_or_else(|| Error::domain("cannot factor the zero polynomial"))?;
    if degree > MAX_FACTOR_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree,
            max: MAX_FACTOR_DEGREE,
        });
    }
    let mut content = f.content();
    if f.leading().unwrap().is_negative() {
        content = -content;
    }
    let primitive = f.primitive_part();
    if degree == 0 {
        return Ok(FactorizationZ {
            content,
            factors: Vec::new(),
        });
    }
    let repeated = primitive.gcd(&primitive.derivative());
    let squarefree = primitive
        .exact_div(&repeated)
        .expect("gcd divides the polynomial");
    let mut irreducibles = split_squarefree(squarefree)?;
    irreducibles.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));

    let mut factors = Vec::with_capacity(irreducibles.len());
    for q in irreducibles {
        let mut rest = primitive.clone();
        let mut e = 0;
        while let Some(next) = rest.exact_div(&q) {
            rest = next;
            e += 1;
        }
        debug_assert!(e >= 1);
        factors.push((q, e));
    }
    Ok(FactorizationZ { content, factors })
}

fn to_u128(v: &BigInt) -> Result<u128> {
    v.abs()
        .to_u128()
        .ok_or_else(|| Error::domain("coefficient too large to factor (exceeds 128 bits)"))
}

fn signed_divisors(v: &BigInt, positive_only: bool) -> Result<Vec<BigInt>> {
    let divisors = factorize(to_u128(v)?)?.divisors();
    let mut out = Vec::with_capacity(divisors.len() * 2);
    for d in divisors {
        let d = BigInt::from(d);
        if !positive_only {
            out.push(-d.clone());
        }
        out.push(d);
    }
    Ok(out)
}

/// Splits a primitive squarefree polynomial with positive leading
/// coefficient into irreducible factors.
fn split_squarefree(mut s: IntPolynomial) -> Result<Vec<IntPolynomial>> {
    let mut out = Vec::new();
    if s.coeff(0).is_zero() {
        out.push(IntPolynomial::x());
        s = s.exact_div(&IntPolynomial::x()).unwrap();
    }
    // rational roots u/v with u | s(0), v | lc(s)
    if s.degree().unwrap_or(0) >= 1 {
        let numerators = signed_divisors(&s.coeff(0), false)?;
        let denominators = signed_divisors(s.leading().unwrap(), true)?;
        for v in &denominators {
            for u in &numerators {
                if !u.gcd(v).is_one() || s.degree().unwrap_or(0) == 0 {
                    continue;
                }
                let n = s.degree().unwrap();
                let mut acc = BigInt::zero();
                for (i, c) in s.coeffs().iter().enumerate() {
                    acc += c * num_traits::pow(u.clone(), i) * num_traits::pow(v.clone(), n - i);
                }
                if acc.is_zero() {
                    let lin = IntPolynomial::new(alloc::vec![-u.clone(), v.clone()]).primitive_part();
                    s = s.exact_div(&lin).expect("rational root gives an exact factor");
                    out.push(lin);
                }
            }
        }
    }
    // no linear factors remain; degrees 2 and 3 are now irreducible
    let mut d = 2;
    while let Some(n) = s.degree() {
        if n == 0 {
            break;
        }
        if 2 * d > n {
            out.push(s.primitive_part());
            break;
        }
        match find_factor_of_degree(&s, d)? {
            Some(g) => {
                s = s.exact_div(&g).expect("candidate verified by division");
                out.push(g);
            }
            None => d += 1,
        }
    }
    Ok(out)
}

/// Interpolation points 0, 1, -1, 2, -2, ...
fn point_sequence() -> impl Iterator<Item = i64> {
    (0..).map(|i: i64| if i % 2 == 0 { -(i / 2) } else { i / 2 + 1 })
}

/// Kronecker's method: any factor `g` of degree `d` has `g(a) | s(a)` at
/// every integer `a`, so `g` is the interpolant of some choice of divisors
/// at `d + 1` points.
fn find_factor_of_degree(s: &IntPolynomial, d: usize) -> Result<Option<IntPolynomial>> {
    // pick the d+1 points with the fewest divisors among a small window
    let mut scored = Vec::new();
    for a in point_sequence().take(3 * (d + 1) + 2) {
        let v = s.eval(&BigInt::from(a));
        debug_assert!(!v.is_zero(), "no rational roots remain");
        let Ok(m) = to_u128(&v) else { continue };
        let tau = factorize(m)?.divisors().len();
        scored.push((tau, a, v));
    }
    if scored.len() < d + 1 {
        return Err(Error::domain("polynomial values too large for factor search"));
    }
    scored.sort_by_key(|(tau, _, _)| *tau);
    scored.truncate(d + 1);
    let points: Vec<i64> = scored.iter().map(|(_, a, _)| *a).collect();
    let mut choices = Vec::with_capacity(d + 1);
    for (j, (_, _, v)) in scored.iter().enumerate() {
        choices.push(signed_divisors(v, j == 0)?);
    }

    let (basis, denom) = lagrange_basis(&points);
    let lc = s.leading().unwrap().clone();
    let c0 = s.coeff(0);

    let mut idx = alloc::vec![0usize; d + 1];
    loop {
        // leading coefficient first: cheap rejection
        let mut lead = BigInt::zero();
        for j in 0..=d {
            lead += &choices[j][idx[j]] * &basis[j][d];
        }
        if !lead.is_zero() && lead.is_multiple_of(&denom) && lc.is_multiple_of(&(&lead / &denom)) {
            let mut coeffs = alloc::vec![BigInt::zero(); d + 1];
            let mut integral = true;
            for (k, slot) in coeffs.iter_mut().enumerate() {
                let mut acc = BigInt::zero();
                for j in 0..=d {
                    acc += &choices[j][idx[j]] * &basis[j][k];
                }
                if !acc.is_multiple_of(&denom) {
                    integral = false;
                    break;
                }
                *slot = acc / &denom;
            }
            if integral && !coeffs[0].is_zero() && c0.is_multiple_of(&coeffs[0]) {
                let g = IntPolynomial::new(coeffs).primitive_part();
                if g.degree() == Some(d) && s.exact_div(&g).is_some() {
                    return Ok(Some(g));
                }
            }
        }
        // odometer
        let mut j = 0;
        loop {
            if j > d {
                return Ok(None);
            }
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Integer Lagrange basis scaled by a common denominator: the interpolant of
/// values `v_j` at `points` is `sum_j v_j * basis[j] / denom`.
fn lagrange_basis(points: &[i64]) -> (Vec<Vec<BigInt>>, BigInt) {
    let n = points.len();
    let mut numerators = Vec::with_capacity(n);
    let mut denominators = Vec::with_capacity(n);
    for (j, &aj) in points.iter().enumerate() {
        let mut num = IntPolynomial::one();
        let mut den = BigInt::one();
        for (i, &ai) in points.iter().enumerate() {
            if i != j {
                num = num.mul(&IntPolynomial::linear_shift(-ai));
                den *= BigInt::from(aj - ai);
            }
        }
        numerators.push(num);
        denominators.push(den);
    }
    let common = denominators
        .iter()
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let basis = numerators
        .iter()
        .zip(&denominators)
        .map(|(num, den)| {
            let scale = &common / den;
            (0..n).map(|k| num.coeff(k) * &scale).collect()
        })
        .collect();
    (basis, common)
}
