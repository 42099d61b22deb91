//! Integer linear recurrences in companion form and exponential-polynomial
//! form.
//!
//! Companion form stores `c_0, ..., c_{k-1}` and `F(0), ..., F(k-1)` with
//! `F(n + k) = sum_j c_j F(n + j)`; its characteristic polynomial is
//! `X^k - c_{k-1} X^{k-1} - ... - c_0`. Exponential-polynomial form stores
//! terms `f_i(n) alpha_i^n` with integer roots `alpha_i`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{gcd_u64, mul_mod, reduce_bigint};
use crate::poly::IntPolynomial;
use crate::{Error, Result};

/// Longest state cycle [`CompanionRecurrence::period_mod`] will walk.
pub const PERIOD_SEARCH_BUDGET: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanionRecurrence {
    coeffs: Vec<BigInt>,
    init: Vec<BigInt>,
}

impl CompanionRecurrence {
    pub fn new(coeffs: Vec<BigInt>, init: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a recurrence needs order at least 1"));
        }
        if coeffs.len() != init.len() {
            return Err(Error::domain(format!(
                "{} coefficients but {} initial values",
                coeffs.len(),
                init.len()
            )));
        }
        if coeffs[0].is_zero() {
            return Err(Error::domain("c_0 must be nonzero"));
        }
        Ok(CompanionRecurrence { coeffs, init })
    }

    pub fn from_i64s(coeffs: &[i64], init: &[i64]) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            init.iter().map(|&c| BigInt::from(c)).collect(),
        )
    }

    /// `F(0) = 0, F(1) = 1, F(n + 2) = F(n + 1) + F(n)`.
    pub fn fibonacci() -> Self {
        Self::lucas(1, 1).expect("Fibonacci is a valid recurrence")
    }

    /// The Lucas sequence `U(0) = 0, U(1) = 1, U(n + 2) = a U(n + 1) + b U(n)`.
    pub fn lucas(a: i64, b: i64) -> Result<Self> {
        Self::from_i64s(&[b, a], &[0, 1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn init(&self) -> &[BigInt] {
        &self.init
    }

    /// `X^k - c_{k-1} X^{k-1} - ... - c_0`.
    pub fn characteristic_polynomial(&self) -> IntPolynomial {
        let mut c: Vec<BigInt> = self.coeffs.iter().map(|a| -a).collect();
        c.push(BigInt::one());
        IntPolynomial::new(c)
    }

    /// Streams `F(0), F(1), ...`.
    pub fn terms(&self) -> Terms {
        Terms {
            coeffs: self.coeffs.clone(),
            window: self.init.clone(),
        }
    }

    /// Streams `F(n), F(n + 1), ...`.
    pub fn terms_from(&self, n: u64) -> Terms {
        Terms {
            coeffs: self.coeffs.clone(),
            window: self.state_at(n),
        }
    }

    /// Exact `F(n)` by direct iteration.
    pub fn eval_exact(&self, n: u64) -> BigInt {
        if (n as usize) < self.order() {
            return self.init[n as usize].clone();
        }
        self.terms().nth(n as usize).unwrap()
    }

    /// Exact state `(F(n), ..., F(n + k - 1))` by companion-matrix powering.
    pub fn state_at(&self, n: u64) -> Vec<BigInt> {
        let k = self.order();
        if n == 0 {
            return self.init.clone();
        }
        let m = self.companion_matrix(|c| c.clone());
        let power = mat_pow(&m, n, &|a: &BigInt, b: &BigInt| a * b, &|a, b| a + b);
        mat_vec(&power, &self.init, &|a, b| a * b, &|a, b| a + b)
            .into_iter()
            .take(k)
            .collect()
    }

    fn companion_matrix<T: Clone + Default>(&self, conv: impl Fn(&BigInt) -> T) -> Vec<Vec<T>>
    where
        T: From<u8>,
    {
        let k = self.order();
        let mut m = vec![vec![T::default(); k]; k];
        for (i, row) in m.iter_mut().enumerate().take(k - 1) {
            row[i + 1] = T::from(1u8);
        }
        for j in 0..k {
            m[k - 1][j] = conv(&self.coeffs[j]);
        }
        m
    }

    /// `F(n) mod m` by binary powering of the companion matrix over `Z/m`.
    pub fn eval_mod(&self, n: u64, m: u64) -> u64 {
        assert!(m >= 1, "modulus must be positive");
        if m == 1 {
            return 0;
        }
        let init: Vec<u64> = self.init.iter().map(|c| reduce_bigint(c, m)).collect();
        if (n as usize) < self.order() {
            return init[n as usize];
        }
        let mat = self.companion_matrix(|c| reduce_bigint(c, m));
        let mul = |a: &u64, b: &u64| mul_mod(*a, *b, m);
        let add = |a: u64, b: u64| ((a as u128 + b as u128) % m as u128) as u64;
        let power = mat_pow(&mat, n, &mul, &add);
        let row = &power[0];
        row.iter()
            .zip(&init)
            .fold(0u64, |acc, (a, b)| add(acc, mul(a, b)))
    }

    /// `F(n) mod m` for an arbitrary-size modulus.
    pub fn eval_mod_big(&self, n: u64, m: &BigUint) -> BigUint {
        assert!(!m.is_zero(), "modulus must be positive");
        let mb = BigInt::from_biguint(Sign::Plus, m.clone());
        let red = |c: &BigInt| c.mod_floor(&mb).to_biguint().unwrap();
        let init: Vec<BigUint> = self.init.iter().map(red).collect();
        if (n as usize) < self.order() {
            return init[n as usize].clone();
        }
        let mat: Vec<Vec<BigUint>> = {
            let k = self.order();
            let mut mat = vec![vec![BigUint::zero(); k]; k];
            for (i, row) in mat.iter_mut().enumerate().take(k - 1) {
                row[i + 1] = BigUint::one() % m;
            }
            for j in 0..k {
                mat[k - 1][j] = red(&self.coeffs[j]);
            }
            mat
        };
        let mul = |a: &BigUint, b: &BigUint| (a * b) % m;
        let add = |a: BigUint, b: BigUint| (a + b) % m;
        let power = mat_pow(&mat, n, &mul, &add);
        power[0]
            .iter()
            .zip(&init)
            .fold(BigUint::zero(), |acc, (a, b)| add(acc, mul(a, b)))
    }

    /// Least period of the state sequence modulo `m` (the Pisano period for
    /// Fibonacci). Requires `gcd(c_0, m) = 1`, which makes the state map a
    /// bijection and the sequence purely periodic.
    pub fn period_mod(&self, m: u64) -> Result<u64> {
        if m < 2 {
            return Err(Error::precondition("modulus must be at least 2"));
        }
        let c0 = reduce_bigint(&self.coeffs[0], m);
        if gcd_u64(c0, m) != 1 {
            return Err(Error::precondition(format!(
                "gcd(c_0, {m}) > 1: the sequence need not be purely periodic"
            )));
        }
        let coeffs: Vec<u64> = self.coeffs.iter().map(|c| reduce_bigint(c, m)).collect();
        let start: Vec<u64> = self.init.iter().map(|c| reduce_bigint(c, m)).collect();
        let mut state = start.clone();
        let k = state.len();
        let mut steps = 0u64;
        loop {
            let next = state
                .iter()
                .zip(&coeffs)
                .fold(0u128, |acc, (s, c)| (acc + mul_mod(*s, *c, m) as u128) % m as u128)
                as u64;
            state.rotate_left(1);
            state[k - 1] = next;
            steps += 1;
            if state == start {
                return Ok(steps);
            }
            if steps >= PERIOD_SEARCH_BUDGET {
                return Err(Error::Budget(format!("period modulo {m} exceeds 2^32")));
            }
        }
    }

    /// One full period of `F(n) mod m`, or `None` if the period exceeds
    /// `max_len` or the precondition of [`Self::period_mod`] fails.
    pub fn residue_cycle(&self, m: u64, max_len: u64) -> Option<Vec<u64>> {
        let c0 = reduce_bigint(&self.coeffs[0], m);
        if m < 2 || gcd_u64(c0, m) != 1 {
            return None;
        }
        let coeffs: Vec<u64> = self.coeffs.iter().map(|c| reduce_bigint(c, m)).collect();
        let start: Vec<u64> = self.init.iter().map(|c| reduce_bigint(c, m)).collect();
        let mut state = start.clone();
        let k = state.len();
        let mut values = Vec::new();
        loop {
            values.push(state[0]);
            let next = state
                .iter()
                .zip(&coeffs)
                .fold(0u128, |acc, (s, c)| (acc + mul_mod(*s, *c, m) as u128) % m as u128)
                as u64;
            state.rotate_left(1);
            state[k - 1] = next;
            if state == start {
                return Some(values);
            }
            if values.len() as u64 >= max_len {
                return None;
            }
        }
    }
}

/// Sliding window over exact recurrence values.
#[derive(Debug, Clone)]
pub struct Terms {
    coeffs: Vec<BigInt>,
    window: Vec<BigInt>,
}

impl Iterator for Terms {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let next = self
            .coeffs
            .iter()
            .zip(&self.window)
            .fold(BigInt::zero(), |acc, (c, v)| {
                if c.is_zero() {
                    acc
                } else if c.is_one() {
                    acc + v
                } else {
                    acc + c * v
                }
            });
        let out = core::mem::replace(&mut self.window[0], next);
        self.window.rotate_left(1);
        Some(out)
    }
}

fn mat_mul<T: Clone>(
    a: &[Vec<T>],
    b: &[Vec<T>],
    mul: &impl Fn(&T, &T) -> T,
    add: &impl Fn(T, T) -> T,
) -> Vec<Vec<T>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (1..n).fold(mul(&a[i][0], &b[0][j]), |acc, l| {
                        add(acc, mul(&a[i][l], &b[l][j]))
                    })
                })
                .collect()
        })
        .collect()
}

fn mat_vec<T: Clone>(
    a: &[Vec<T>],
    v: &[T],
    mul: &impl Fn(&T, &T) -> T,
    add: &impl Fn(T, T) -> T,
) -> Vec<T> {
    a.iter()
        .map(|row| {
            (1..v.len()).fold(mul(&row[0], &v[0]), |acc, l| add(acc, mul(&row[l], &v[l])))
        })
        .collect()
}

fn mat_pow<T: Clone>(
    m: &[Vec<T>],
    mut e: u64,
    mul: &impl Fn(&T, &T) -> T,
    add: &impl Fn(T, T) -> T,
) -> Vec<Vec<T>> {
    debug_assert!(e >= 1);
    let mut base = m.to_vec();
    let mut acc: Option<Vec<Vec<T>>> = None;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => mat_mul(&a, &base, mul, add),
            });
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base, mul, add);
        }
    }
    acc.unwrap()
}

/// One term `f(n) * root^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpTerm {
    pub poly: IntPolynomial,
    pub root: i64,
}

/// `F(n) = sum_i f_i(n) alpha_i^n` with distinct nonzero integer roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPolyRecurrence {
    terms: Vec<ExpTerm>,
}

impl ExpPolyRecurrence {
    pub fn new(terms: Vec<ExpTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("an exponential polynomial needs at least one term"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.root == 0 {
                return Err(Error::domain("roots must be nonzero"));
            }
            if t.poly.is_zero() {
                return Err(Error::domain("term polynomials must be nonzero"));
            }
            if terms[..i].iter().any(|s| s.root == t.root) {
                return Err(Error::domain(format!("root {} repeated", t.root)));
            }
        }
        Ok(ExpPolyRecurrence { terms })
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn roots(&self) -> Vec<i64> {
        self.terms.iter().map(|t| t.root).collect()
    }

    /// Number of terms `r`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All `f_i` constant.
    pub fn is_simple(&self) -> bool {
        self.terms.iter().all(|t| t.poly.is_constant())
    }

    pub fn eval_exact(&self, n: u64) -> BigInt {
        let nb = BigInt::from(n);
        self.terms.iter().fold(BigInt::zero(), |acc, t| {
            acc + t.poly.eval(&nb) * num_traits::pow(BigInt::from(t.root), n as usize)
        })
    }

    /// A pair of roots whose ratio is a root of unity. Over `Q` the only
    /// roots of unity are `1` and `-1`, and roots are distinct, so this is a
    /// pair `(a, -a)`.
    pub fn degeneracy_witness(&self) -> Option<(i64, i64)> {
        let roots = self.roots();
        for (i, &a) in roots.iter().enumerate() {
            for &b in &roots[i + 1..] {
                if a == -b {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy_witness().is_none()
    }

    /// Whether the group generated by the roots has torsion; for integer
    /// roots that happens exactly when some root is negative.
    pub fn has_torsion(&self) -> bool {
        self.terms.iter().any(|t| t.root < 0)
    }

    /// Companion form with characteristic polynomial
    /// `prod_i (X - alpha_i)^(deg f_i + 1)`.
    pub fn expand_to_companion(&self) -> CompanionRecurrence {
        let chi = self.terms.iter().fold(IntPolynomial::one(), |acc, t| {
            let e = t.poly.degree().unwrap() as u32 + 1;
            acc.mul(&IntPolynomial::linear_shift(-t.root).pow(e))
        });
        let k = chi.degree().unwrap();
        let coeffs = (0..k).map(|j| -chi.coeff(j)).collect();
        let init = (0..k as u64).map(|n| self.eval_exact(n)).collect();
        CompanionRecurrence::new(coeffs, init).expect("nonzero roots give c_0 != 0")
    }
}

/// A recurrence in either form. Exponential polynomials keep their expanded
/// companion form alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recurrence {
    Companion(CompanionRecurrence),
    ExpPoly {
        terms: ExpPolyRecurrence,
        companion: CompanionRecurrence,
    },
}

impl Recurrence {
    pub fn companion(&self) -> &CompanionRecurrence {
        match self {
            Recurrence::Companion(c) => c,
            Recurrence::ExpPoly { companion, .. } => companion,
        }
    }

    pub fn exppoly(&self) -> Option<&ExpPolyRecurrence> {
        match self {
            Recurrence::Companion(_) => None,
            Recurrence::ExpPoly { terms, .. } => Some(terms),
        }
    }

    pub fn eval_exact(&self, n: u64) -> BigInt {
        match self {
            Recurrence::Companion(c) => c.eval_exact(n),
            Recurrence::ExpPoly { terms, .. } => terms.eval_exact(n),
        }
    }
}

impl From<CompanionRecurrence> for Recurrence {
    fn from(c: CompanionRecurrence) -> Self {
        Recurrence::Companion(c)
    }
}

impl From<ExpPolyRecurrence> for Recurrence {
    fn from(e: ExpPolyRecurrence) -> Self {
        let companion = e.expand_to_companion();
        Recurrence::ExpPoly {
            terms: e,
            companion,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term(poly: &[i64], root: i64) -> ExpTerm {
        ExpTerm {
            poly: IntPolynomial::from_i64s(poly),
            root,
        }
    }

    /// Fast-doubling Fibonacci mod m; independent of the matrix route.
    fn fib_doubling(n: u64, m: u64) -> (u64, u64) {
        if n == 0 {
            return (0, 1 % m);
        }
        let (a, b) = fib_doubling(n / 2, m);
        let two_b = (2 * b as u128 % m as u128) as u64;
        let c = mul_mod(a, (two_b + m - a) % m, m);
        let d = ((mul_mod(a, a, m) as u128 + mul_mod(b, b, m) as u128) % m as u128) as u64;
        if n % 2 == 0 {
            (c, d)
        } else {
            (d, (c + d) % m)
        }
    }

    #[test]
    fn fibonacci_values() {
        let fib = CompanionRecurrence::fibonacci();
        assert_eq!(fib.eval_exact(0), BigInt::zero());
        assert_eq!(fib.eval_exact(10), BigInt::from(55));
        assert_eq!(fib.eval_mod(10, 10), 5);
        assert_eq!(fib.eval_mod(1, 10), 1);
        assert_eq!(fib.state_at(10), vec![BigInt::from(55), BigInt::from(89)]);
    }

    #[test]
    fn fibonacci_mod_prime_at_2_pow_40() {
        let m = 1_000_000_007;
        let n = 1u64 << 40;
        let fib = CompanionRecurrence::fibonacci();
        assert_eq!(fib.eval_mod(n, m), fib_doubling(n, m).0);
        let big = fib.eval_mod_big(n, &BigUint::from(m));
        assert_eq!(big, BigUint::from(fib_doubling(n, m).0));
    }

    #[test]
    fn exppoly_evaluation() {
        // 2^(n+1) - 2 = 2 * 2^n - 2 * 1^n
        let e = ExpPolyRecurrence::new(vec![term(&[2], 2), term(&[-2], 1)]).unwrap();
        assert_eq!(e.eval_exact(3), BigInt::from(14));
        assert!(e.is_simple());
    }

    #[test]
    fn expansion_examples() {
        let geo = ExpPolyRecurrence::new(vec![term(&[1], 2)]).unwrap();
        let c = geo.expand_to_companion();
        assert_eq!(c.coeffs(), &[BigInt::from(2)]);
        assert_eq!(c.init(), &[BigInt::one()]);

        let lin = ExpPolyRecurrence::new(vec![term(&[0, 1], 1)]).unwrap();
        let c = lin.expand_to_companion();
        assert_eq!(c.coeffs(), &[BigInt::from(-1), BigInt::from(2)]);
        assert_eq!(c.init(), &[BigInt::zero(), BigInt::one()]);

        let pm = ExpPolyRecurrence::new(vec![term(&[1], 2), term(&[1], -2)]).unwrap();
        let c = pm.expand_to_companion();
        assert_eq!(c.coeffs(), &[BigInt::from(4), BigInt::zero()]);
        assert_eq!(c.init(), &[BigInt::from(2), BigInt::zero()]);
    }

    #[test]
    fn degeneracy() {
        let a = ExpPolyRecurrence::new(vec![term(&[1], 2), term(&[1], 3)]).unwrap();
        assert!(a.is_nondegenerate());
        let b = ExpPolyRecurrence::new(vec![term(&[1], 2), term(&[1], -2)]).unwrap();
        assert_eq!(b.degeneracy_witness(), Some((2, -2)));
        assert!(b.has_torsion());
        let c = ExpPolyRecurrence::new(vec![term(&[1], 1), term(&[1], 2), term(&[1], 4)]).unwrap();
        assert!(c.is_nondegenerate());
        assert!(!c.has_torsion());
    }

    #[test]
    fn constructor_errors() {
        assert!(CompanionRecurrence::from_i64s(&[0, 1], &[0, 1]).is_err());
        assert!(CompanionRecurrence::from_i64s(&[1], &[0, 1]).is_err());
        assert!(ExpPolyRecurrence::new(vec![]).is_err());
        assert!(ExpPolyRecurrence::new(vec![term(&[1], 0)]).is_err());
        assert!(ExpPolyRecurrence::new(vec![term(&[1], 3), term(&[2], 3)]).is_err());
        assert!(ExpPolyRecurrence::new(vec![term(&[], 3)]).is_err());
    }

    #[test]
    fn periods() {
        let fib = CompanionRecurrence::fibonacci();
        assert_eq!(fib.period_mod(10).unwrap(), 60);
        assert_eq!(fib.period_mod(2).unwrap(), 3);
        let constant = CompanionRecurrence::from_i64s(&[1], &[5]).unwrap();
        assert_eq!(constant.period_mod(7).unwrap(), 1);
        let doubling = CompanionRecurrence::from_i64s(&[2], &[1]).unwrap();
        assert!(matches!(doubling.period_mod(4), Err(Error::Precondition(_))));
        assert_eq!(fib.residue_cycle(10, 100).unwrap().len(), 60);
        assert!(fib.residue_cycle(10, 59).is_none());
    }

    #[test]
    fn characteristic_polynomial_sign_convention() {
        let fib = CompanionRecurrence::fibonacci();
        assert_eq!(fib.characteristic_polynomial(), IntPolynomial::from_i64s(&[-1, -1, 1]));
    }

    fn small_companion() -> impl Strategy<Value = CompanionRecurrence> {
        (1usize..=4).prop_flat_map(|k| {
            (
                prop::collection::vec(-5i64..=5, k),
                prop::collection::vec(-5i64..=5, k),
            )
                .prop_filter_map("c_0 != 0", |(mut c, init)| {
                    if c[0] == 0 {
                        c[0] = 1;
                    }
                    CompanionRecurrence::from_i64s(&c, &init).ok()
                })
        })
    }

    fn small_exppoly() -> impl Strategy<Value = ExpPolyRecurrence> {
        prop::collection::btree_map(
            prop::sample::select(vec![-5i64, -4, -3, -2, -1, 1, 2, 3, 4, 5]),
            prop::collection::vec(-4i64..=4, 1..=3),
            1..=4,
        )
        .prop_filter_map("nonzero polys", |m| {
            let terms = m
                .into_iter()
                .map(|(root, poly)| term(&poly, root))
                .collect();
            ExpPolyRecurrence::new(terms).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn eval_mod_matches_exact(rec in small_companion(), n in 0u64..1000, m in 2u64..1_000_000) {
            let exact = rec.eval_exact(n);
            prop_assert_eq!(rec.eval_mod(n, m), reduce_bigint(&exact, m));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn expansion_round_trip(e in small_exppoly()) {
            let c = e.expand_to_companion();
            for (n, v) in c.terms().take(201).enumerate() {
                prop_assert_eq!(v, e.eval_exact(n as u64));
            }
        }

        #[test]
        fn state_at_matches_iteration(rec in small_companion(), n in 0u64..300) {
            let direct: Vec<BigInt> = rec.terms().skip(n as usize).take(rec.order()).collect();
            prop_assert_eq!(rec.state_at(n), direct);
        }

        #[test]
        fn values_repeat_with_period(rec in small_companion(), m in 2u64..200, n in 0u64..500) {
            let c0 = reduce_bigint(&rec.coeffs()[0], m);
            prop_assume!(gcd_u64(c0, m) == 1);
            let period = rec.period_mod(m).unwrap();
            prop_assert_eq!(rec.eval_mod(n, m), rec.eval_mod(n % period, m));
            prop_assert_eq!(rec.eval_mod(n + period, m), rec.eval_mod(n, m));
        }
    }
}
