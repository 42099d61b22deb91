//! Zeros of sparse exponential sums `sum_i c_i a_i^m` over a finite field,
//! and the bound `4 (q - 1) N^(-1 / 2^(r - 2))` on their number.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{factorize_u64, field_make, is_prime, FieldElement, FiniteField};
use crate::exec::chunk_count;
use crate::{Error, Executor, Result};

/// Largest field size for brute-force counting.
pub const MAX_COUNT_Q: u64 = 1 << 20;
/// Largest field size in the stress harness.
pub const MAX_STRESS_Q: u64 = 1 << 16;

const M_CHUNK: u64 = 1 << 14;
const TRIALS_PER_CHUNK: u64 = 16;

/// `c_1 a_1^m + ... + c_r a_r^m` over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseInstance {
    field: FiniteField,
    c: Vec<FieldElement>,
    a: Vec<FieldElement>,
}

impl SparseInstance {
    pub fn new(field: FiniteField, c: Vec<FieldElement>, a: Vec<FieldElement>) -> Result<Self> {
        if c.is_empty() || c.len() != a.len() {
            return Err(Error::domain(format!(
                "need r >= 1 coefficients and bases, got {} and {}",
                c.len(),
                a.len()
            )));
        }
        if c.iter().chain(&a).any(|e| field.is_zero(e)) {
            return Err(Error::domain("coefficients and bases must be nonzero"));
        }
        for (i, x) in a.iter().enumerate() {
            if a[..i].contains(x) {
                return Err(Error::domain("bases must be pairwise distinct"));
            }
        }
        Ok(SparseInstance { field, c, a })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn bases(&self) -> &[FieldElement] {
        &self.a
    }

    pub fn r(&self) -> usize {
        self.c.len()
    }

    /// `sum_i c_i a_i^m`, by fast exponentiation.
    pub fn eval(&self, m: u64) -> FieldElement {
        let f = &self.field;
        self.c.iter().zip(&self.a).fold(f.zero(), |acc, (c, a)| {
            f.add(&acc, &f.mul(c, &f.pow(a, m)))
        })
    }

    /// Zeros with `m` in `[lo, hi)`, by one incremental power chain per term.
    fn count_range(&self, lo: u64, hi: u64) -> u64 {
        let f = &self.field;
        let mut terms: Vec<FieldElement> = self
            .c
            .iter()
            .zip(&self.a)
            .map(|(c, a)| f.mul(c, &f.pow(a, lo)))
            .collect();
        let mut zeros = 0;
        for _ in lo..hi {
            let s = terms.iter().fold(f.zero(), |acc, t| f.add(&acc, t));
            if f.is_zero(&s) {
                zeros += 1;
            }
            for (t, a) in terms.iter_mut().zip(&self.a) {
                *t = f.mul(t, a);
            }
        }
        zeros
    }

    /// Stable textual form: `{"p":..,"k":..,"modulus":[..],"c":[[..]],"a":[[..]]}`.
    pub fn describe(&self) -> String {
        let f = &self.field;
        let elems = |v: &[FieldElement]| {
            let mut s = String::from("[");
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{:?}", f.coefficients(e));
            }
            s.push(']');
            s.replace(' ', "")
        };
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\"p\":{},\"k\":{},\"modulus\":{:?},\"c\":{},\"a\":{}}}",
            f.characteristic(),
            f.degree(),
            f.modulus(),
            elems(&self.c),
            elems(&self.a)
        );
        out.replace(", ", ",")
    }
}

/// Number of `m` in `[0, q - 2]` with `sum_i c_i a_i^m = 0`.
pub fn sparse_zero_count<E: Executor>(exec: &E, inst: &SparseInstance) -> Result<u64> {
    let q = inst.field.order();
    if q > MAX_COUNT_Q {
        return Err(Error::SizeCap(format!("q = {q} above 2^20")));
    }
    if inst.r() == 1 {
        return Ok(0);
    }
    let len = q - 1;
    let counts = exec.map_chunks(chunk_count(len, M_CHUNK), |c| {
        let lo = c as u64 * M_CHUNK;
        inst.count_range(lo, (lo + M_CHUNK).min(len))
    });
    Ok(counts.into_iter().sum())
}

/// Minimum multiplicative order of `a_i / a_j` over `i != j`. A single term
/// has no ratios, so the bound leaves `N` free; this is reported as a
/// precondition error.
pub fn min_ratio_order(inst: &SparseInstance) -> Result<u64> {
    if inst.r() < 2 {
        return Err(Error::precondition("N is arbitrary when r = 1"));
    }
    let f = &inst.field;
    let mut best = u64::MAX;
    for (i, x) in inst.a.iter().enumerate() {
        for y in &inst.a[i + 1..] {
            best = best.min(f.multiplicative_order(&f.div(x, y)?)?);
        }
    }
    Ok(best)
}

/// `4 (q - 1) N^(-1 / 2^(r - 2))`; `None` for `r < 2`.
pub fn ff_bound(q: u64, n: u64, r: usize) -> Option<f64> {
    if r < 2 || n == 0 {
        return None;
    }
    let exponent = -libm::ldexp(1.0, -(r as i32 - 2));
    Some(4.0 * (q - 1) as f64 * libm::pow(n as f64, exponent))
}

/// The weaker form `4 (q - 1) p^(-1 / 2^r)` used when the ratio orders are
/// only known to be at least `p^(1/4)` and two extra terms are absorbed.
pub fn proof_form_bound(q: u64, p: u64, r: usize) -> f64 {
    let exponent = -libm::ldexp(1.0, -(r as i32));
    4.0 * (q - 1) as f64 * libm::pow(p as f64, exponent)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceReport {
    pub q: u64,
    pub r: usize,
    pub count: u64,
    /// `None` for `r = 1`.
    pub n: Option<u64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

/// Count, `N`, bound and their ratio for one instance.
pub fn analyze<E: Executor>(exec: &E, inst: &SparseInstance) -> Result<InstanceReport> {
    let count = sparse_zero_count(exec, inst)?;
    let q = inst.field.order();
    let n = if inst.r() >= 2 { Some(min_ratio_order(inst)?) } else { None };
    let bound = n.and_then(|n| ff_bound(q, n, inst.r()));
    Ok(InstanceReport {
        q,
        r: inst.r(),
        count,
        n,
        bound,
        ratio: bound.map(|b| count as f64 / b),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressConfig {
    pub trials: u64,
    pub seed: u64,
    pub q_max: u64,
    pub r_values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressRow {
    pub r: usize,
    pub trials: u64,
    pub max_ratio: f64,
    pub max_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressReport {
    pub trials: u64,
    pub violations: u64,
    pub max_ratio: f64,
    /// Trial index and description of the instance attaining `max_ratio`.
    pub worst: Option<(u64, String)>,
    pub per_r: Vec<StressRow>,
}

/// Prime powers `q = p^k` with `r + 1 <= q <= q_max`.
fn field_sizes(q_max: u64, r_max: usize) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for p in 2..=q_max {
        if !is_prime(p) {
            continue;
        }
        let mut q = p;
        let mut k = 1;
        while q <= q_max && k <= crate::arith::MAX_EXTENSION_DEGREE {
            if q > r_max as u64 {
                out.push((p, k));
            }
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
            k += 1;
        }
    }
    out
}

/// Random instance for one trial. Half the trials draw bases from a coset of
/// a small subgroup, which forces small ratio orders.
pub fn random_instance(config: &StressConfig, sizes: &[(u64, usize)], trial: u64) -> Result<SparseInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let r = config.r_values[rng.gen_range(0..config.r_values.len())];
    let fits: Vec<&(u64, usize)> = sizes.iter().filter(|(p, k)| p.pow(*k as u32) > r as u64).collect();
    let &(p, k) = fits[rng.gen_range(0..fits.len())];
    let field = field_make(p, k, rng.gen())?;
    let q = field.order();
    let c: Vec<FieldElement> = (0..r).map(|_| field.random_nonzero(&mut rng)).collect();
    let mut a: Vec<FieldElement> = Vec::with_capacity(r);
    let small_subgroup = rng.gen_bool(0.5);
    let divisors: Vec<u64> = factorize_u64(q - 1)
        .divisors()
        .into_iter()
        .map(|d| d as u64)
        .filter(|&d| d >= r as u64)
        .collect();
    if small_subgroup && !divisors.is_empty() {
        let d = divisors[rng.gen_range(0..divisors.len().min(4))];
        let g = field.pow(&field.primitive_element(), (q - 1) / d);
        let shift = field.random_nonzero(&mut rng);
        while a.len() < r {
            let e = field.mul(&shift, &field.pow(&g, rng.gen_range(0..d)));
            if !a.contains(&e) {
                a.push(e);
            }
        }
    } else {
        while a.len() < r {
            let e = field.random_nonzero(&mut rng);
            if !a.contains(&e) {
                a.push(e);
            }
        }
    }
    SparseInstance::new(field, c, a)
}

/// Checks `count <= 4 (q - 1) N^(-1 / 2^(r - 2))` on seeded random instances.
/// Any violation is returned as [`Error::Violation`] carrying the instance.
pub fn stress_lemma<E: Executor>(exec: &E, config: &StressConfig) -> Result<StressReport> {
    if config.q_max > MAX_STRESS_Q {
        return Err(Error::SizeCap(format!("q_max = {} above 2^16", config.q_max)));
    }
    let r_max = *config
        .r_values
        .iter()
        .max()
        .ok_or_else(|| Error::domain("no values of r"))?;
    if config.r_values.contains(&0) {
        return Err(Error::domain("r must be at least 1"));
    }
    let sizes = field_sizes(config.q_max, r_max);
    if sizes.is_empty() {
        return Err(Error::domain(format!("no field with r < q <= {}", config.q_max)));
    }
    let results: Vec<Result<Vec<(u64, InstanceReport)>>> =
        exec.map_chunks(chunk_count(config.trials, TRIALS_PER_CHUNK), |c| {
            let lo = c as u64 * TRIALS_PER_CHUNK;
            let hi = (lo + TRIALS_PER_CHUNK).min(config.trials);
            (lo..hi)
                .map(|t| {
                    let inst = random_instance(config, &sizes, t)?;
                    let rep = analyze(&crate::Sequential, &inst)?;
                    if rep.bound.is_some_and(|b| rep.count as f64 > b) {
                        return Err(Error::Violation(format!(
                            "trial {t}: {} zeros exceed bound {} for {}",
                            rep.count,
                            rep.bound.unwrap(),
                            inst.describe()
                        )));
                    }
                    Ok((t, rep))
                })
                .collect()
        });
    let mut report = StressReport {
        trials: config.trials,
        violations: 0,
        max_ratio: 0.0,
        worst: None,
        per_r: Vec::new(),
    };
    let mut r_sorted = config.r_values.clone();
    r_sorted.sort_unstable();
    r_sorted.dedup();
    report.per_r = r_sorted
        .iter()
        .map(|&r| StressRow {
            r,
            trials: 0,
            max_ratio: 0.0,
            max_count: 0,
        })
        .collect();
    for chunk in results {
        for (t, rep) in chunk? {
            let row = report.per_r.iter_mut().find(|row| row.r == rep.r).unwrap();
            row.trials += 1;
            row.max_count = row.max_count.max(rep.count);
            if let Some(ratio) = rep.ratio {
                row.max_ratio = row.max_ratio.max(ratio);
                if ratio > report.max_ratio || report.worst.is_none() {
                    report.max_ratio = ratio;
                    let inst = random_instance(config, &sizes, t)?;
                    report.worst = Some((t, inst.describe()));
                }
            }
        }
    }
    Ok(report)
}
