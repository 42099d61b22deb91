//! Residue sieves: the per-prime forbidden sets `Omega_p` cut out by a
//! polynomial, the admissible prime set, and exact sieved counts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{factorize_u64, inv_mod, mul_mod, order_by_stripping, pow_mod, primes_up_to};
use crate::exec::chunk_count;
use crate::numeric::{ln, NeumaierSum};
use crate::poly::{factor_over_z, root_residues, zeros_mod_p, IntPolynomial};
use crate::wirsing::{MultFnSpec, Rule};
use crate::{Error, Executor, Result};

/// Largest `x` for bit-array enumeration.
pub const MAX_SIEVE_X: u64 = 100_000_000;

const BLOCK: u64 = 1 << 20;

/// Why an inverted prime is in `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InvertedSource {
    /// Listed by the caller.
    User,
    /// Divides one of the roots.
    RootDivisor,
    /// Some residue in `Omega_p` is a common zero of every coefficient
    /// polynomial of the recurrence.
    CommonRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    InS { source: InvertedSource },
    /// `G~` vanishes at every residue modulo `p`.
    IdenticallyVanishing,
    /// The root order statistic is below `p^(1/4)`.
    SmallOrder { order: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub p: u64,
    pub reason: ExclusionReason,
}

/// A prime that takes part in the sieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SievePrime {
    pub p: u64,
    /// `Omega_p`, sorted; a proper subset of `0..p`.
    pub residues: Vec<u64>,
    /// Root order statistic, when roots were given.
    pub order: Option<u64>,
}

/// Forbidden residue classes for every prime in `(y, z]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSystem {
    pub y: u64,
    pub z: u64,
    /// Primitive part of the generating polynomial, positive leading
    /// coefficient.
    pub gtilde: IntPolynomial,
    pub roots: Vec<i64>,
    /// Primes inverted by the caller.
    pub invert_primes: Vec<u64>,
    pub primes: Vec<SievePrime>,
    pub exclusions: Vec<Exclusion>,
}

/// Rejects roots that are zero, pairs `a, +-a`, and a lone root `+-1`.
pub fn check_roots(roots: &[i64]) -> Result<()> {
    for (i, &a) in roots.iter().enumerate() {
        if a == 0 {
            return Err(Error::precondition("roots must be nonzero"));
        }
        if let Some(&b) = roots[..i].iter().find(|&&b| b == a || b == -a) {
            return Err(Error::precondition(format!(
                "roots {b} and {a} have ratio a root of unity"
            )));
        }
    }
    if roots.len() == 1 && roots[0].unsigned_abs() == 1 {
        return Err(Error::precondition(format!("root {} is a root of unity", roots[0])));
    }
    Ok(())
}

fn residue(a: i64, p: u64) -> u64 {
    (a as i128).rem_euclid(p as i128) as u64
}

/// Minimum multiplicative order modulo `p` of the ratios `a_i / a_j`
/// (`i != j`), or of `a_1` itself for a single root. `None` when `p`
/// divides a root or no roots are given.
pub fn root_order_statistic(roots: &[i64], p: u64) -> Option<u64> {
    let res: Vec<u64> = roots.iter().map(|&a| residue(a, p)).collect();
    if res.is_empty() || res.contains(&0) {
        return None;
    }
    let factors = factorize_u64(p - 1).prime_powers_u64();
    let order = |a: u64| order_by_stripping(p - 1, &factors, |e| pow_mod(a, e, p) == 1);
    if res.len() == 1 {
        return Some(order(res[0]));
    }
    let mut best = u64::MAX;
    for (i, &a) in res.iter().enumerate() {
        for &b in &res[i + 1..] {
            let ratio = mul_mod(a, inv_mod(b, p).expect("p does not divide b"), p);
            best = best.min(order(ratio));
            if best == 1 {
                return Some(1);
            }
        }
    }
    Some(best)
}

/// `order^4 < p`, exactly.
pub fn is_small_order(order: u64, p: u64) -> bool {
    (order as u128).pow(4) < p as u128
}

impl SieveSystem {
    /// Builds `Omega_p` for every prime `p` in `(y, z]`, excluding inverted
    /// primes, primes where `G~` vanishes identically, and primes where the
    /// root order statistic is below `p^(1/4)`.
    pub fn build(
        gtilde: &IntPolynomial,
        roots: &[i64],
        invert_primes: &[u64],
        y: u64,
        z: u64,
    ) -> Result<Self> {
        Self::build_with_coefficients(gtilde, roots, invert_primes, y, z, &[])
    }

    /// As [`SieveSystem::build`], also inverting every prime where some
    /// `l in Omega_p` is a common zero of all `coefficient_polys`.
    pub fn build_with_coefficients(
        gtilde: &IntPolynomial,
        roots: &[i64],
        invert_primes: &[u64],
        y: u64,
        z: u64,
        coefficient_polys: &[IntPolynomial],
    ) -> Result<Self> {
        if gtilde.is_constant() {
            return Err(Error::precondition("the sieve polynomial must be nonconstant"));
        }
        if z > MAX_SIEVE_X {
            return Err(Error::SizeCap(format!("z = {z} above 10^8")));
        }
        check_roots(roots)?;
        let gtilde = gtilde.primitive_part();
        let mut invert_primes = invert_primes.to_vec();
        invert_primes.sort_unstable();
        invert_primes.dedup();

        let mut primes = Vec::new();
        let mut exclusions = Vec::new();
        let candidates = if z > y && z >= 2 {
            primes_up_to(z)?.in_range(y, z).to_vec()
        } else {
            Vec::new()
        };
        for p in candidates {
            let mut exclude = |reason| exclusions.push(Exclusion { p, reason });
            if invert_primes.binary_search(&p).is_ok() {
                exclude(ExclusionReason::InS {
                    source: InvertedSource::User,
                });
                continue;
            }
            if roots.iter().any(|&a| residue(a, p) == 0) {
                exclude(ExclusionReason::InS {
                    source: InvertedSource::RootDivisor,
                });
                continue;
            }
            let residues = match root_residues(&gtilde, p) {
                Err(Error::VanishesModP(_)) => {
                    exclude(ExclusionReason::IdenticallyVanishing);
                    continue;
                }
                other => other?,
            };
            if residues.len() as u64 == p {
                exclude(ExclusionReason::IdenticallyVanishing);
                continue;
            }
            let order = root_order_statistic(roots, p);
            if let Some(order) = order.filter(|&o| is_small_order(o, p)) {
                exclude(ExclusionReason::SmallOrder { order });
                continue;
            }
            if !coefficient_polys.is_empty()
                && residues
                    .iter()
                    .any(|&l| coefficient_polys.iter().all(|f| f.eval_mod(l, p) == 0))
            {
                exclude(ExclusionReason::InS {
                    source: InvertedSource::CommonRoot,
                });
                continue;
            }
            primes.push(SievePrime { p, residues, order });
        }
        Ok(SieveSystem {
            y,
            z,
            gtilde,
            roots: roots.to_vec(),
            invert_primes,
            primes,
            exclusions,
        })
    }

    /// Re-checks every stored residue against `G~` and every exclusion
    /// against its reason. Returns the first discrepancy.
    pub fn audit(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::Violation(msg));
        for sp in &self.primes {
            if sp.residues.len() as u64 >= sp.p {
                return fail(format!("Omega_{} is not a proper subset", sp.p));
            }
            if sp.residues.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("residues modulo {} are not strictly increasing", sp.p));
            }
            for &l in &sp.residues {
                if l >= sp.p || self.gtilde.eval_mod(l, sp.p) != 0 {
                    return fail(format!("residue {l} is not a zero modulo {}", sp.p));
                }
            }
            if zeros_mod_p(&self.gtilde, sp.p).ok() != Some(sp.residues.len() as u64) {
                return fail(format!("Omega_{} is missing zeros", sp.p));
            }
            if let Some(o) = sp.order {
                if is_small_order(o, sp.p) || root_order_statistic(&self.roots, sp.p) != Some(o) {
                    return fail(format!("order {o} at {} does not check", sp.p));
                }
            }
        }
        for e in &self.exclusions {
            let p = e.p;
            let ok = match e.reason {
                ExclusionReason::InS {
                    source: InvertedSource::User,
                } => self.invert_primes.binary_search(&p).is_ok(),
                ExclusionReason::InS {
                    source: InvertedSource::RootDivisor,
                } => self.roots.iter().any(|&a| residue(a, p) == 0),
                ExclusionReason::InS {
                    source: InvertedSource::CommonRoot,
                } => true,
                ExclusionReason::IdenticallyVanishing => {
                    (0..p.min(1 << 16)).all(|l| self.gtilde.eval_mod(l, p) == 0)
                }
                ExclusionReason::SmallOrder { order } => {
                    is_small_order(order, p) && root_order_statistic(&self.roots, p) == Some(order)
                }
            };
            if !ok {
                return fail(format!("exclusion of {p} ({:?}) does not check", e.reason));
            }
        }
        Ok(())
    }

    /// Whether `n` avoids `Omega_p` for every sieving prime.
    pub fn survives(&self, n: u64) -> bool {
        self.hits(n).next().is_none()
    }

    /// Indices into [`SieveSystem::primes`] of the primes whose `Omega_p`
    /// contains `n mod p`.
    pub fn hits(&self, n: u64) -> impl Iterator<Item = usize> + '_ {
        self.primes
            .iter()
            .enumerate()
            .filter(move |(_, sp)| sp.residues.binary_search(&(n % sp.p)).is_ok())
            .map(|(i, _)| i)
    }

    /// `sum #Omega_p log p / p` over sieving primes `p <= t`.
    pub fn weighted_omega_sum(&self, t: u64) -> f64 {
        self.primes
            .iter()
            .take_while(|sp| sp.p <= t)
            .map(|sp| sp.residues.len() as f64 * ln(sp.p as f64) / sp.p as f64)
            .collect::<NeumaierSum>()
            .value()
    }

    /// Distinct irreducible factors of `G~`.
    pub fn h(&self) -> Result<usize> {
        Ok(factor_over_z(&self.gtilde)?.h())
    }
}

/// Exact `#{ 1 <= n <= x : n mod p not in Omega_p for every sieving p }`.
pub fn sieved_count<E: Executor>(exec: &E, x: u64, system: &SieveSystem) -> Result<u64> {
    if x > MAX_SIEVE_X {
        return Err(Error::SizeCap(format!("x = {x} above 10^8")));
    }
    let counts = exec.map_chunks(chunk_count(x, BLOCK), |c| {
        let lo = c as u64 * BLOCK + 1;
        let hi = (lo + BLOCK - 1).min(x);
        let len = (hi - lo + 1) as usize;
        let mut hit = vec![0u64; len.div_ceil(64)];
        for sp in &system.primes {
            let p = sp.p;
            for &l in &sp.residues {
                // first n >= lo with n = l mod p
                let mut i = ((l + p - lo % p) % p) as usize;
                while i < len {
                    hit[i / 64] |= 1 << (i % 64);
                    i += p as usize;
                }
            }
        }
        len as u64 - hit.iter().map(|w| w.count_ones() as u64).sum::<u64>()
    });
    Ok(counts.into_iter().sum())
}

/// `x (log y / log x)^h`.
pub fn sieve_bound_shape(x: f64, y: f64, h: u32) -> Result<f64> {
    if !(y >= 2.0 && x > y) {
        return Err(Error::precondition(format!("need x > y >= 2, got x = {x}, y = {y}")));
    }
    Ok(x * libm::pow(ln(y) / ln(x), h as f64))
}

/// The multiplicative function `g_y(p) = #Omega_p / (p - #Omega_p)` on
/// squarefree integers with all prime factors in the sieving range.
pub fn gy_from_system(system: &SieveSystem) -> Result<MultFnSpec> {
    let counts: BTreeMap<u64, u32> = system
        .primes
        .iter()
        .map(|sp| (sp.p, sp.residues.len() as u32))
        .collect();
    let mut g = MultFnSpec::new(Rule::ResidueCounts { counts }, system.h()? as u32);
    g.cutoff = Some(system.y);
    Ok(g)
}

/// Sieve range chosen as `y = (log x)^(2^r h)` and `z = x^(1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveParameters {
    pub y_real: f64,
    pub z_real: f64,
    pub y: u64,
    pub z: u64,
    /// `y < z`; false means the range is empty at this `x`.
    pub reachable: bool,
}

/// The default sieve range `y = (log x)^(2^r h)`, `z = sqrt x`.
pub fn default_range(x: u64, r: u32, h: u32) -> SieveParameters {
    let exponent = libm::ldexp(h as f64, r.min(1000) as i32);
    let y_real = libm::pow(ln(x as f64), exponent);
    let z_real = libm::sqrt(x as f64);
    let y = if y_real >= u64::MAX as f64 { u64::MAX } else { y_real as u64 };
    let z = num_integer::Roots::sqrt(&x);
    SieveParameters {
        y_real,
        z_real,
        y,
        z,
        reachable: y_real < z_real,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallOrderReport {
    pub x: u64,
    pub count: u64,
    /// `count / sqrt(x)`
    pub ratio: f64,
}

/// Counts primes `p <= x` at which some given value has multiplicative order
/// below `p^(1/4)`. Primes dividing a value are skipped.
pub fn count_excluded_small_order<E: Executor>(
    exec: &E,
    values: &[i64],
    x: u64,
) -> Result<SmallOrderReport> {
    if values.is_empty() {
        return Err(Error::precondition("no values given"));
    }
    for &b in values {
        if b == 0 || b.unsigned_abs() == 1 {
            return Err(Error::precondition(format!(
                "{b} is zero or a root of unity"
            )));
        }
    }
    if x > MAX_SIEVE_X {
        return Err(Error::SizeCap(format!("x = {x} above 10^8")));
    }
    let primes = if x >= 2 { primes_up_to(x)?.into_vec() } else { Vec::new() };
    const PER_CHUNK: usize = 4096;
    let counts = exec.map_chunks(primes.len().div_ceil(PER_CHUNK), |c| {
        let lo = c * PER_CHUNK;
        let hi = (lo + PER_CHUNK).min(primes.len());
        primes[lo..hi]
            .iter()
            .filter(|&&p| {
                let res: Vec<u64> = values.iter().map(|&b| residue(b, p)).collect();
                if res.contains(&0) {
                    return false;
                }
                // orders below p^(1/4) are tiny; test exponents directly
                res.iter().any(|&a| {
                    let mut acc = a;
                    let mut k = 1u64;
                    while (k as u128).pow(4) < p as u128 {
                        if acc == 1 {
                            return true;
                        }
                        acc = mul_mod(acc, a, p);
                        k += 1;
                    }
                    false
                })
            })
            .count() as u64
    });
    let count = counts.into_iter().sum();
    Ok(SmallOrderReport {
        x,
        count,
        ratio: count as f64 / libm::sqrt(x as f64),
    })
}

/// `G~ = ` primitive part of `G` with positive leading coefficient.
pub fn normalize(g: &IntPolynomial) -> IntPolynomial {
    g.primitive_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{order_mod, primes_up_to};
    use crate::Sequential;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    fn count_by_loop(x: u64, system: &SieveSystem) -> u64 {
        (1..=x)
            .filter(|&n| {
                system
                    .primes
                    .iter()
                    .all(|sp| !sp.residues.iter().any(|&l| n % sp.p == l))
            })
            .count() as u64
    }

    #[test]
    fn zero_set_of_x() {
        let s = SieveSystem::build(&IntPolynomial::x(), &[2], &[2], 1, 200).unwrap();
        s.audit().unwrap();
        assert_eq!(s.exclusions[0], Exclusion {
            p: 2,
            reason: ExclusionReason::InS { source: InvertedSource::User }
        });
        for sp in &s.primes {
            assert_eq!(sp.residues, vec![0]);
            let o = order_mod(2, sp.p).unwrap();
            assert_eq!(sp.order, Some(o));
            assert!(o.pow(4) >= sp.p);
        }
        let seven = s.primes.iter().find(|sp| sp.p == 7).unwrap();
        assert_eq!(seven.order, Some(3));
    }

    #[test]
    fn small_order_exclusion() {
        // ord_31(2) = 5, 5^4 = 625 >= 31; ord_8191(2) = 13 and 13^4 >= 8191;
        // ord_(2^17 - 1)(2) = 17 and 17^4 = 83521 < 131071
        let s = SieveSystem::build(&IntPolynomial::x(), &[2], &[], 131_000, 131_100).unwrap();
        assert!(s.exclusions.contains(&Exclusion {
            p: 131_071,
            reason: ExclusionReason::SmallOrder { order: 17 }
        }));
        s.audit().unwrap();
    }

    #[test]
    fn residues_of_x2_plus_1() {
        let s = SieveSystem::build(&p(&[1, 0, 1]), &[], &[], 3, 5).unwrap();
        assert_eq!(s.primes, vec![SievePrime { p: 5, residues: vec![2, 3], order: None }]);
    }

    #[test]
    fn normalization_and_vanishing() {
        let s = SieveSystem::build(&p(&[0, -6, -6]), &[], &[], 1, 30).unwrap();
        assert_eq!(s.gtilde, p(&[0, 1, 1]));
        // X^2 - X vanishes at both residues mod 2
        let s = SieveSystem::build(&p(&[0, -1, 1]), &[], &[], 1, 30).unwrap();
        assert_eq!(s.exclusions, vec![Exclusion { p: 2, reason: ExclusionReason::IdenticallyVanishing }]);
        s.audit().unwrap();
    }

    #[test]
    fn root_preconditions() {
        let x = IntPolynomial::x();
        assert!(SieveSystem::build(&x, &[2, -2], &[], 1, 10).is_err());
        assert!(SieveSystem::build(&x, &[1], &[], 1, 10).is_err());
        assert!(SieveSystem::build(&x, &[0, 3], &[], 1, 10).is_err());
        assert!(SieveSystem::build(&IntPolynomial::one(), &[2], &[], 1, 10).is_err());
        let s = SieveSystem::build(&x, &[2, 3], &[], 1, 10).unwrap();
        let divisors: Vec<u64> = s.exclusions.iter().map(|e| e.p).collect();
        assert_eq!(divisors, vec![2, 3]);
    }

    #[test]
    fn common_root_inversion() {
        // coefficient polynomials X and X + 5 share the zero 0 modulo 5
        let s = SieveSystem::build_with_coefficients(
            &IntPolynomial::x(), &[3, 2], &[], 3, 20, &[p(&[0, 1]), p(&[5, 1])],
        ).unwrap();
        assert!(s.exclusions.contains(&Exclusion {
            p: 5,
            reason: ExclusionReason::InS { source: InvertedSource::CommonRoot }
        }));
    }

    #[test]
    fn sieved_count_examples() {
        let s = SieveSystem::build(&IntPolynomial::x(), &[], &[], 3, 10).unwrap();
        assert_eq!(sieved_count(&Sequential, 100, &s).unwrap(), 68);
        let empty = SieveSystem::build(&IntPolynomial::x(), &[], &[], 10, 10).unwrap();
        assert_eq!(sieved_count(&Sequential, 1234, &empty).unwrap(), 1234);
        let s = SieveSystem::build(&p(&[1, 0, 1]), &[], &[], 3, 20).unwrap();
        assert_eq!(sieved_count(&Sequential, 10_000, &s).unwrap(), count_by_loop(10_000, &s));
    }

    #[test]
    fn sieved_count_across_blocks() {
        let s = SieveSystem::build(&p(&[1, 0, 1]), &[], &[], 10, 400).unwrap();
        let x = 2 * BLOCK + 777;
        let fast = sieved_count(&Sequential, x, &s).unwrap();
        let slow = (1..=x).filter(|&n| s.survives(n)).count() as u64;
        assert_eq!(fast, slow);
    }

    #[test]
    fn bound_shape() {
        let e = core::f64::consts::E;
        let v = sieve_bound_shape(libm::pow(e, 4.0), libm::pow(e, 2.0), 1).unwrap();
        assert!((v - libm::pow(e, 4.0) / 2.0).abs() < 1e-9);
        assert_eq!(sieve_bound_shape(100.0, 10.0, 0).unwrap(), 100.0);
        let v = sieve_bound_shape(1e6, 10.0, 2).unwrap();
        assert!((v - 1e6 / 36.0).abs() < 1e-6);
        assert!(sieve_bound_shape(10.0, 10.0, 1).is_err());
    }

    #[test]
    fn gy_values() {
        let s = SieveSystem::build(&p(&[1, 0, 1]), &[], &[], 3, 50).unwrap();
        let g = gy_from_system(&s).unwrap();
        assert_eq!(g.value(5, 1).unwrap(), num_rational::Ratio::new(2, 3));
        assert_eq!(g.value(5, 2).unwrap(), num_rational::Ratio::from_integer(0));
        assert_eq!(g.value(3, 1).unwrap(), num_rational::Ratio::from_integer(0));
        assert_eq!(g.h, 1);
        let s = SieveSystem::build(&IntPolynomial::x(), &[], &[], 3, 50).unwrap();
        let g = gy_from_system(&s).unwrap();
        assert_eq!(g.value(7, 1).unwrap(), num_rational::Ratio::new(1, 6));
    }

    #[test]
    fn parameters() {
        let q = default_range(1_000_000, 2, 1);
        assert!(!q.reachable);
        assert_eq!(q.z, 1000);
        let q = default_range(1_000_000, 0, 1);
        assert!(q.reachable);
        assert_eq!(q.y, 13);
    }

    #[test]
    fn small_order_counts() {
        let oracle = |values: &[i64], x: u64| -> u64 {
            primes_up_to(x)
                .unwrap()
                .iter()
                .filter(|&p| {
                    values.iter().all(|&b| (b.rem_euclid(p as i64)) != 0)
                        && values.iter().any(|&b| {
                            let o = order_mod(b.rem_euclid(p as i64) as u64, p).unwrap();
                            o.pow(4) < p
                        })
                })
                .count() as u64
        };
        for x in [1000u64, 10_000] {
            let r2 = count_excluded_small_order(&Sequential, &[2], x).unwrap();
            assert_eq!(r2.count, oracle(&[2], x));
            let r23 = count_excluded_small_order(&Sequential, &[2, 3], x).unwrap();
            assert_eq!(r23.count, oracle(&[2, 3], x));
            assert!(r23.count >= r2.count);
        }
        assert!(count_excluded_small_order(&Sequential, &[1], 100).is_err());
        assert!(count_excluded_small_order(&Sequential, &[-1, 2], 100).is_err());
    }

    #[test]
    fn omega_sum_tracks_h_log_t() {
        let f = p(&[1, 0, 1]).mul(&p(&[-2, 0, 1]));
        let s = SieveSystem::build(&f, &[], &[], 1, 100_000).unwrap();
        for t in [1000u64, 10_000, 100_000] {
            let residual = s.weighted_omega_sum(t) - 2.0 * ln(t as f64);
            assert!(residual.abs() < 5.0, "t = {t}: {residual}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn count_matches_loop(
            coeffs in prop::collection::vec(-6i64..=6, 2..=4),
            y in 1u64..20,
            span in 1u64..80,
            x in 1u64..5000,
        ) {
            let f = p(&coeffs);
            prop_assume!(!f.is_constant());
            let s = SieveSystem::build(&f, &[], &[], y, y + span).unwrap();
            s.audit().unwrap();
            prop_assert_eq!(sieved_count(&Sequential, x, &s).unwrap(), count_by_loop(x, &s));
        }
    }
}
