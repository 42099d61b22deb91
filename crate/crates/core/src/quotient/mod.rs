//! The set `{ n : G(n) != 0, F(n)/G(n) in Z[1/S] }` for an integer linear
//! recurrence `F`, an integer polynomial `G` and a finite prime set `S`:
//! membership, exact counts, the split into sieve survivors and sieve hits,
//! and the prime-tuple family.

mod hl;

pub use hl::{
    admissible, hl_count, hl_count_by_sieve, hl_family, singular_series, Admissibility,
    SingularSeries, MAX_HL_H, MAX_HL_X,
};

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{gcd_u64, is_prime, reduce_bigint};
use crate::ffzeros::ff_bound;
use crate::numeric::ln;
use crate::poly::{factor_over_z, IntPolynomial};
use crate::recurrence::{ExpPolyRecurrence, ExpTerm, Recurrence};
use crate::sieve::{default_range, SieveSystem};
use crate::{Error, Executor, Result};

/// Largest `x` for exact big-integer enumeration.
pub const MAX_EXACT_X: u64 = 1_000_000;
/// Largest `x` for the modular filter.
pub const MAX_FILTER_X: u64 = 100_000_000;
/// Reports list members only up to this many.
pub const MEMBER_CAP: usize = 100_000;

const EXACT_CHUNK: u64 = 1 << 15;
const FILTER_CHUNK: u64 = 1 << 16;
const CHUNKS_PER_BATCH: usize = 64;
const FILTER_PRIME_LIMIT: u64 = 60;
const FILTER_MODULUS_LIMIT: u64 = 1 << 16;
const FILTER_PERIOD_LIMIT: u64 = 1 << 20;

/// Flags attached to a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Caveat {
    /// `F` was given only in companion form, so common factors of `G` and
    /// the coefficient polynomials were not divided out and `h` comes from
    /// `G` directly.
    CompanionOnly,
    /// `G` is a nonzero constant.
    ConstantG,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientProblem {
    f: Recurrence,
    g: IntPolynomial,
    invert_primes: Vec<u64>,
    g_normalized: IntPolynomial,
    f_polys_normalized: Vec<IntPolynomial>,
    h: usize,
    caveats: Vec<Caveat>,
}

impl QuotientProblem {
    pub fn new(f: Recurrence, g: IntPolynomial, invert_primes: &[u64]) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::domain("G must be nonzero"));
        }
        let mut s = invert_primes.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&q) = s.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::domain(format!("inverted prime {q} is not prime")));
        }
        let mut caveats = Vec::new();
        let (g_normalized, f_polys_normalized) = match f.exppoly() {
            Some(e) => {
                if let Some((a, b)) = e.degeneracy_witness() {
                    return Err(Error::domain(format!(
                        "F is degenerate (roots {a} and {b}); split n into residue classes \
                         modulo 2 and treat each arithmetic progression separately"
                    )));
                }
                if e.has_torsion() {
                    return Err(Error::domain(
                        "the roots of F generate a group with torsion (a negative root); \
                         split n into residue classes modulo 2 and treat each arithmetic \
                         progression separately",
                    ));
                }
                let d = e
                    .terms()
                    .iter()
                    .fold(g.primitive_part(), |acc, t| acc.gcd(&t.poly));
                let g_n = g.exact_div(&d).expect("the gcd divides G");
                let f_n = e
                    .terms()
                    .iter()
                    .map(|t| t.poly.exact_div(&d).expect("the gcd divides each f_i"))
                    .collect();
                (g_n, f_n)
            }
            None => {
                caveats.push(Caveat::CompanionOnly);
                (g.clone(), Vec::new())
            }
        };
        if g_normalized.is_constant() {
            caveats.push(Caveat::ConstantG);
        }
        let h = factor_over_z(&g_normalized)?.h();
        Ok(QuotientProblem {
            f,
            g,
            invert_primes: s,
            g_normalized,
            f_polys_normalized,
            h,
            caveats,
        })
    }

    pub fn f(&self) -> &Recurrence {
        &self.f
    }

    pub fn g(&self) -> &IntPolynomial {
        &self.g
    }

    pub fn invert_primes(&self) -> &[u64] {
        &self.invert_primes
    }

    /// `G` after dividing out `gcd(G, f_1, ..., f_r)`.
    pub fn g_normalized(&self) -> &IntPolynomial {
        &self.g_normalized
    }

    /// Distinct irreducible factors of the normalized `G`.
    pub fn h(&self) -> usize {
        self.h
    }

    /// Number of terms of `F`, when known in exponential-polynomial form.
    pub fn r(&self) -> Option<usize> {
        self.f.exppoly().map(ExpPolyRecurrence::len)
    }

    pub fn caveats(&self) -> &[Caveat] {
        &self.caveats
    }

    /// `|v|` with every prime of `S` divided out.
    fn strip(&self, v: &BigInt) -> BigUint {
        let mut m = v.magnitude().clone();
        for &q in &self.invert_primes {
            let qb = BigUint::from(q);
            loop {
                let (d, r) = m.div_rem(&qb);
                if !r.is_zero() {
                    break;
                }
                m = d;
            }
        }
        m
    }

    /// `G(n) != 0` and `F(n)/G(n) in Z[1/S]`.
    pub fn membership(&self, n: u64) -> bool {
        let gn = self.g.eval_u64(n);
        if gn.is_zero() {
            return false;
        }
        let d = self.strip(&gn);
        if d.is_one() {
            return true;
        }
        let rec = self.f.companion();
        match d.to_u64() {
            Some(d) => rec.eval_mod(n, d) == 0,
            None => rec.eval_mod_big(n, &d).is_zero(),
        }
    }

    /// Membership given the exact value `F(n)`.
    fn membership_with_value(&self, n: u64, fn_value: &BigInt) -> bool {
        let gn = self.g.eval_u64(n);
        if gn.is_zero() {
            return false;
        }
        let d = self.strip(&gn);
        match d.to_u64() {
            Some(1) => true,
            Some(d) => (fn_value.magnitude() % d).is_zero(),
            None => (fn_value.magnitude() % &d).is_zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Stream exact values of `F(n)`.
    Exact,
    /// Discard `n` by congruences modulo small prime powers, then confirm
    /// the survivors by modular evaluation.
    ModularFilter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub x: u64,
    pub mode: CountMode,
    pub count: u64,
    /// All members, sorted, when retained and at most [`MEMBER_CAP`].
    pub members: Option<Vec<u64>>,
    /// A seeded uniform sample of [`MEMBER_CAP`] members, sorted, when the
    /// count exceeds the cap.
    pub sample: Option<Vec<u64>>,
    pub h: usize,
    /// `x (log log x / log x)^h`, for `x >= 3`.
    pub bound_shape: Option<f64>,
    /// `count / bound_shape`
    pub ratio: Option<f64>,
}

/// `x (log log x / log x)^h`.
pub fn main_bound_shape(x: u64, h: usize) -> Option<f64> {
    if x < 3 {
        return None;
    }
    let lx = ln(x as f64);
    Some(x as f64 * libm::pow(ln(lx) / lx, h as f64))
}

fn mix(seed: u64, n: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = n ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Congruence filter modulo one prime power.
struct PrimeFilter {
    ell: u64,
    modulus: u64,
    /// `F(n) mod modulus` over one period.
    cycle: Vec<u64>,
}

impl PrimeFilter {
    /// Rejects `n` when `ell^v | G(n)` (capped at `modulus`) but not `F(n)`.
    fn passes(&self, g: &IntPolynomial, n: u64) -> bool {
        let gr = g.eval_mod(n, self.modulus);
        let mut need = 1u64;
        let mut rest = gr;
        if rest == 0 {
            need = self.modulus;
        } else {
            while rest % self.ell == 0 {
                rest /= self.ell;
                need *= self.ell;
            }
        }
        need == 1 || self.cycle[(n % self.cycle.len() as u64) as usize] % need == 0
    }
}

fn build_filters(prob: &QuotientProblem) -> Vec<PrimeFilter> {
    let rec = prob.f.companion();
    let c0 = &rec.coeffs()[0];
    let mut out = Vec::new();
    for ell in 2..=FILTER_PRIME_LIMIT {
        if !is_prime(ell) || prob.invert_primes.contains(&ell) {
            continue;
        }
        if gcd_u64(reduce_bigint(c0, ell), ell) != 1 {
            continue;
        }
        let mut modulus = ell;
        while modulus * ell <= FILTER_MODULUS_LIMIT {
            modulus *= ell;
        }
        while modulus >= ell {
            if let Some(cycle) = rec.residue_cycle(modulus, FILTER_PERIOD_LIMIT) {
                out.push(PrimeFilter { ell, modulus, cycle });
                break;
            }
            modulus /= ell;
        }
    }
    out
}

/// Sorted members in `[1, x]`, one vector per chunk.
fn members_by_chunk<E: Executor>(
    exec: &E,
    prob: &QuotientProblem,
    x: u64,
    mode: CountMode,
    mut sink: impl FnMut(Vec<u64>),
) -> Result<()> {
    let limit = match mode {
        CountMode::Exact => MAX_EXACT_X,
        CountMode::ModularFilter => MAX_FILTER_X,
    };
    if x > limit {
        return Err(Error::SizeCap(format!("x = {x} above {limit} for {mode:?} mode")));
    }
    let width = match mode {
        CountMode::Exact => EXACT_CHUNK,
        CountMode::ModularFilter => FILTER_CHUNK,
    };
    let filters = match mode {
        CountMode::Exact => Vec::new(),
        CountMode::ModularFilter => build_filters(prob),
    };
    let chunks = crate::exec::chunk_count(x, width);
    let job = |c: usize| -> Vec<u64> {
        let lo = c as u64 * width + 1;
        let hi = (lo + width - 1).min(x);
        match mode {
            CountMode::Exact => prob
                .f
                .companion()
                .terms_from(lo)
                .zip(lo..=hi)
                .filter(|(v, n)| prob.membership_with_value(*n, v))
                .map(|(_, n)| n)
                .collect(),
            CountMode::ModularFilter => (lo..=hi)
                .filter(|&n| filters.iter().all(|f| f.passes(&prob.g, n)) && prob.membership(n))
                .collect(),
        }
    };
    let mut start = 0;
    while start < chunks {
        let len = CHUNKS_PER_BATCH.min(chunks - start);
        for v in exec.map_chunks(len, |i| job(start + i)) {
            sink(v);
        }
        start += len;
    }
    Ok(())
}

/// Counts `n <= x` in the set. Members are kept when `retain` is set.
pub fn count_n<E: Executor>(
    exec: &E,
    prob: &QuotientProblem,
    x: u64,
    mode: CountMode,
    retain: bool,
    seed: u64,
) -> Result<CountReport> {
    let mut count = 0u64;
    let mut members: Vec<u64> = Vec::new();
    let mut sample: Vec<(u64, u64)> = Vec::new();
    members_by_chunk(exec, prob, x, mode, |chunk| {
        count += chunk.len() as u64;
        if !retain {
            return;
        }
        if members.len() <= MEMBER_CAP {
            members.extend_from_slice(&chunk);
        }
        // bottom-k by seeded hash: a uniform sample that merges across chunks
        sample.extend(chunk.iter().map(|&n| (mix(seed, n), n)));
        if sample.len() > 2 * MEMBER_CAP {
            sample.sort_unstable();
            sample.truncate(MEMBER_CAP);
        }
    })?;
    let (members, sample) = if !retain {
        (None, None)
    } else if count as usize <= MEMBER_CAP {
        (Some(members), None)
    } else {
        sample.sort_unstable();
        sample.truncate(MEMBER_CAP);
        let mut s: Vec<u64> = sample.into_iter().map(|(_, n)| n).collect();
        s.sort_unstable();
        (None, Some(s))
    };
    let bound_shape = main_bound_shape(x, prob.h);
    Ok(CountReport {
        x,
        mode,
        count,
        members,
        sample,
        h: prob.h,
        bound_shape,
        ratio: bound_shape.map(|b| count as f64 / b),
    })
}

/// Per-prime line of the split diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPrimeRow {
    pub p: u64,
    pub omega_size: usize,
    /// Minimum order of the root ratios modulo `p`.
    pub order: u64,
    /// Members `n` with `n mod p` in `Omega_p`.
    pub hits: u64,
    /// `#Omega_p min(p - 1, floor(4 (p - 1) N^(-1/2^(r-2)))) (floor(x / (p (p - 1))) + 1)`
    pub explicit_bound: u64,
    /// `x / p^(1 + 1/2^r)`
    pub shape: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub r: usize,
    pub h: usize,
    /// The default `(y, z)` were replaced by the caller.
    pub overridden: bool,
    /// The default range is nonempty at this `x`.
    pub reachable: bool,
    pub count: u64,
    pub n1: u64,
    pub n2: u64,
    pub excluded_primes: usize,
    pub histogram: Vec<SplitPrimeRow>,
    /// `max hits p^(1 + 1/2^r) / x`
    pub fitted_constant: f64,
    /// `8 deg G~`, valid for primes with `p (p - 1) <= x`.
    pub a_priori_constant: f64,
    /// Every row satisfies `hits <= explicit_bound`.
    pub explicit_ok: bool,
    /// Every row with `p (p - 1) <= x` satisfies `hits <= 8 deg G~ shape`.
    pub dominated: bool,
}

/// Splits the members up to `x` into those avoiding every `Omega_p`,
/// `p in (y, z]`, and those hitting one, and compares the per-prime hit
/// counts with `x / p^(1 + 1/2^r)`.
pub fn split_diagnostic<E: Executor>(
    exec: &E,
    prob: &QuotientProblem,
    x: u64,
    range: Option<(u64, u64)>,
) -> Result<SplitReport> {
    let e = prob.f.exppoly().ok_or_else(|| {
        Error::precondition("the split needs F in exponential-polynomial form")
    })?;
    let r = e.len();
    let h = prob.h;
    let params = default_range(x, r as u32, h as u32);
    let (y, z) = match range {
        Some(yz) => yz,
        None if params.reachable => (params.y, params.z),
        None => {
            return Err(Error::Regime(format!(
                "at x = {x} the default sieve range is empty: y = (log x)^(2^{r} * {h}) = {:.4e} \
                 is not below z = x^(1/2) = {:.4e}; pass an explicit (y, z)",
                params.y_real, params.z_real
            )))
        }
    };
    let system = SieveSystem::build_with_coefficients(
        &prob.g_normalized,
        &e.roots(),
        &prob.invert_primes,
        y,
        z,
        &prob.f_polys_normalized,
    )?;
    let mode = if x <= MAX_EXACT_X / 10 { CountMode::Exact } else { CountMode::ModularFilter };
    let mut hits = alloc::vec![0u64; system.primes.len()];
    let (mut count, mut n1, mut n2) = (0u64, 0u64, 0u64);
    members_by_chunk(exec, prob, x, mode, |chunk| {
        for n in chunk {
            count += 1;
            let mut any = false;
            for i in system.hits(n) {
                hits[i] += 1;
                any = true;
            }
            if any {
                n2 += 1;
            } else {
                n1 += 1;
            }
        }
    })?;
    if n1 + n2 != count {
        return Err(Error::Violation(format!("{n1} + {n2} != {count}")));
    }
    let deg = system.gtilde.degree().unwrap_or(0) as f64;
    let a_priori = 8.0 * deg;
    let exponent = 1.0 + libm::ldexp(1.0, -(r as i32));
    let mut fitted: f64 = 0.0;
    let mut explicit_ok = true;
    let mut dominated = true;
    let histogram = system
        .primes
        .iter()
        .zip(&hits)
        .map(|(sp, &hits)| {
            let p = sp.p;
            let order = sp.order.expect("roots are present");
            let classes = match ff_bound(p, order, r) {
                None => 0,
                Some(b) => ((b + 1e-9) as u64).min(p - 1),
            };
            let explicit_bound =
                sp.residues.len() as u64 * classes * (x / (p * (p - 1)) + 1);
            let shape = x as f64 / libm::pow(p as f64, exponent);
            fitted = fitted.max(hits as f64 / shape);
            explicit_ok &= hits <= explicit_bound;
            if p * (p - 1) <= x {
                dominated &= hits as f64 <= a_priori * shape;
            }
            SplitPrimeRow {
                p,
                omega_size: sp.residues.len(),
                order,
                hits,
                explicit_bound,
                shape,
            }
        })
        .collect();
    Ok(SplitReport {
        x,
        y,
        z,
        r,
        h,
        overridden: range.is_some(),
        reachable: params.reachable,
        count,
        n1,
        n2,
        excluded_primes: system.exclusions.len(),
        histogram,
        fitted_constant: fitted,
        a_priori_constant: a_priori,
        explicit_ok,
        dominated,
    })
}

/// `c * root^n` as a term.
pub fn simple_term(c: i64, root: i64) -> ExpTerm {
    ExpTerm {
        poly: IntPolynomial::from_i64s(&[c]),
        root,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::CompanionRecurrence;
    use crate::Sequential;
    use proptest::prelude::*;
    use std::vec;
    use std::vec::Vec;

    fn fib_problem() -> QuotientProblem {
        QuotientProblem::new(CompanionRecurrence::fibonacci().into(), IntPolynomial::x(), &[]).unwrap()
    }

    fn brute(prob: &QuotientProblem, x: u64) -> Vec<u64> {
        let mut v = Vec::new();
        // closed form for exponential polynomials; one streamed pass otherwise
        let mut stream = prob.f().companion().terms().skip(1);
        for n in 1..=x {
            let f = match prob.f().exppoly() {
                Some(e) => e.eval_exact(n),
                None => stream.next().unwrap(),
            };
            let g = prob.g().eval_u64(n);
            if g.is_zero() {
                continue;
            }
            // F/G in Z[1/S] iff G divides F * s for the S-part s of G
            let mut s = BigInt::one();
            let mut rest = g.clone();
            for &q in prob.invert_primes() {
                while (&rest % q).is_zero() {
                    rest /= q;
                    s *= q;
                }
            }
            if ((&f * &s) % &g).is_zero() {
                v.push(n);
            }
        }
        v
    }

    #[test]
    fn fibonacci_members() {
        let prob = fib_problem();
        assert!(prob.membership(1));
        assert!(prob.membership(12));
        assert!(!prob.membership(2));
        for mode in [CountMode::Exact, CountMode::ModularFilter] {
            let r = count_n(&Sequential, &prob, 100, mode, true, 0).unwrap();
            assert_eq!(r.members.unwrap(), vec![1, 5, 12, 24, 25, 36, 48, 60, 72, 96]);
            assert_eq!(r.count, 10);
            assert_eq!(r.count, brute(&prob, 100).len() as u64);
        }
        assert_eq!(prob.caveats(), &[Caveat::CompanionOnly]);
        assert_eq!(prob.h(), 1);
    }

    #[test]
    fn modes_agree_on_fibonacci() {
        let prob = fib_problem();
        let a = count_n(&Sequential, &prob, 20_000, CountMode::Exact, true, 0).unwrap();
        let b = count_n(&Sequential, &prob, 20_000, CountMode::ModularFilter, true, 0).unwrap();
        assert_eq!(a.members, b.members);
        assert_eq!(a.members.unwrap(), brute(&prob, 20_000));
    }

    #[test]
    fn ratio_identically_one() {
        // F(n) = n^2 - 4 (root 1) and G = X^2 - 4: every n except n = 2
        let f = ExpPolyRecurrence::new(vec![ExpTerm { poly: IntPolynomial::from_i64s(&[-4, 0, 1]), root: 1 }]).unwrap();
        let prob = QuotientProblem::new(f.into(), IntPolynomial::from_i64s(&[-4, 0, 1]), &[]).unwrap();
        assert!(prob.g_normalized().is_constant());
        assert_eq!(prob.h(), 0);
        assert!(prob.caveats().contains(&Caveat::ConstantG));
        let r = count_n(&Sequential, &prob, 1000, CountMode::Exact, false, 0).unwrap();
        assert_eq!(r.count, 999);
        assert_eq!(r.members, None);
    }

    #[test]
    fn gcd_normalization() {
        // F(n) = n 2^n + n 3^n, G = X (X + 1): normalized G = X + 1
        let f = ExpPolyRecurrence::new(vec![
            ExpTerm { poly: IntPolynomial::from_i64s(&[0, 1]), root: 2 },
            ExpTerm { poly: IntPolynomial::from_i64s(&[0, 1]), root: 3 },
        ]).unwrap();
        let prob = QuotientProblem::new(f.into(), IntPolynomial::from_i64s(&[0, 1, 1]), &[]).unwrap();
        assert_eq!(prob.g_normalized(), &IntPolynomial::from_i64s(&[1, 1]));
        assert_eq!(prob.h(), 1);
    }

    #[test]
    fn torsion_is_rejected() {
        let f = ExpPolyRecurrence::new(vec![simple_term(1, 2), simple_term(1, -3)]).unwrap();
        let err = QuotientProblem::new(f.into(), IntPolynomial::x(), &[]).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("arithmetic progression")));
        let f = ExpPolyRecurrence::new(vec![simple_term(1, 2), simple_term(1, -2)]).unwrap();
        assert!(QuotientProblem::new(f.into(), IntPolynomial::x(), &[]).is_err());
        assert!(QuotientProblem::new(CompanionRecurrence::fibonacci().into(), IntPolynomial::zero(), &[]).is_err());
        assert!(QuotientProblem::new(CompanionRecurrence::fibonacci().into(), IntPolynomial::x(), &[4]).is_err());
    }

    #[test]
    fn inverted_primes() {
        let f = ExpPolyRecurrence::new(vec![simple_term(1, 2), simple_term(-2, 1)]).unwrap();
        let plain = QuotientProblem::new(f.clone().into(), IntPolynomial::x(), &[]).unwrap();
        let inv = QuotientProblem::new(f.into(), IntPolynomial::x(), &[2, 3]).unwrap();
        let a = count_n(&Sequential, &plain, 3000, CountMode::Exact, true, 0).unwrap();
        let b = count_n(&Sequential, &inv, 3000, CountMode::ModularFilter, true, 0).unwrap();
        assert_eq!(a.members.clone().unwrap(), brute(&plain, 3000));
        assert_eq!(b.members.clone().unwrap(), brute(&inv, 3000));
        assert!(a.count < b.count);
        // every member without S stays a member with S
        let bm = b.members.unwrap();
        assert!(a.members.unwrap().iter().all(|n| bm.binary_search(n).is_ok()));
    }

    #[test]
    fn sample_beyond_cap() {
        let f = ExpPolyRecurrence::new(vec![ExpTerm { poly: IntPolynomial::from_i64s(&[0, 1]), root: 1 }]).unwrap();
        let prob = QuotientProblem::new(f.into(), IntPolynomial::one(), &[]).unwrap();
        let x = MEMBER_CAP as u64 + 5000;
        let r = count_n(&Sequential, &prob, x, CountMode::ModularFilter, true, 9).unwrap();
        assert_eq!(r.count, x);
        assert!(r.members.is_none());
        let s = r.sample.unwrap();
        assert_eq!(s.len(), MEMBER_CAP);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        let again = count_n(&Sequential, &prob, x, CountMode::ModularFilter, true, 9).unwrap();
        assert_eq!(again.sample.unwrap(), s);
    }

    #[test]
    fn bound_shape_values() {
        assert_eq!(main_bound_shape(2, 1), None);
        let v = main_bound_shape(1_000_000, 1).unwrap();
        let lx = ln(1e6);
        assert!((v - 1e6 * ln(lx) / lx).abs() < 1e-6);
        assert_eq!(main_bound_shape(100, 0), Some(100.0));
    }

    #[test]
    fn split_partition_and_bounds() {
        // 2^n - 2 over n
        let f = ExpPolyRecurrence::new(vec![simple_term(1, 2), simple_term(-2, 1)]).unwrap();
        let prob = QuotientProblem::new(f.into(), IntPolynomial::x(), &[]).unwrap();
        let rep = split_diagnostic(&Sequential, &prob, 10_000, Some((10, 100))).unwrap();
        assert_eq!(rep.n1 + rep.n2, rep.count);
        assert!(rep.explicit_ok);
        assert!(rep.dominated);
        // recompute N2 directly from residues
        let members = brute(&prob, 10_000);
        let primes: Vec<u64> = rep.histogram.iter().map(|row| row.p).collect();
        let direct_n2 = members.iter().filter(|&&n| primes.iter().any(|&p| n % p == 0)).count() as u64;
        assert_eq!(rep.n2, direct_n2);
        for row in &rep.histogram {
            let direct = members.iter().filter(|&&n| n % row.p == 0).count() as u64;
            assert_eq!(row.hits, direct);
        }
        let empty = split_diagnostic(&Sequential, &prob, 10_000, Some((50, 50))).unwrap();
        assert_eq!(empty.n2, 0);
        assert_eq!(empty.n1, rep.count);
    }

    #[test]
    fn split_regime_error() {
        let f = ExpPolyRecurrence::new(vec![simple_term(1, 2), simple_term(-2, 1)]).unwrap();
        let prob = QuotientProblem::new(f.into(), IntPolynomial::x(), &[]).unwrap();
        assert!(matches!(split_diagnostic(&Sequential, &prob, 10_000, None), Err(Error::Regime(_))));
        let fib = fib_problem();
        assert!(matches!(split_diagnostic(&Sequential, &fib, 100, Some((2, 5))), Err(Error::Precondition(_))));
    }

    fn random_problem() -> impl Strategy<Value = QuotientProblem> {
        (
            prop::collection::btree_map(1i64..=5, -3i64..=3, 1..=3),
            prop::collection::vec(-3i64..=3, 1..=3),
            prop::sample::subsequence(vec![2u64, 3, 5], 0..=2),
        )
            .prop_filter_map("valid problem", |(terms, mut g, s)| {
                let terms = terms.into_iter().filter(|(_, c)| *c != 0).map(|(a, c)| simple_term(c, a)).collect();
                let f = ExpPolyRecurrence::new(terms).ok()?;
                g.push(1);
                QuotientProblem::new(f.into(), IntPolynomial::from_i64s(&g), &s).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn modes_agree(prob in random_problem()) {
            let a = count_n(&Sequential, &prob, 2000, CountMode::Exact, true, 0).unwrap();
            let b = count_n(&Sequential, &prob, 2000, CountMode::ModularFilter, true, 0).unwrap();
            prop_assert_eq!(&a.members, &b.members);
            prop_assert_eq!(a.members.unwrap(), brute(&prob, 2000));
        }

        #[test]
        fn count_is_monotone(prob in random_problem(), x1 in 1u64..500, dx in 0u64..500) {
            let a = count_n(&Sequential, &prob, x1, CountMode::ModularFilter, false, 0).unwrap();
            let b = count_n(&Sequential, &prob, x1 + dx, CountMode::ModularFilter, false, 0).unwrap();
            prop_assert!(a.count <= b.count);
        }
    }
}
