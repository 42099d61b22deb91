//! Multiplicative functions given by their values at prime powers, their
//! associated von Mangoldt functions, partial sums, and Euler-product mean
//! value constants.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::arith::{primes_up_to, SmallestFactorTable};
use crate::exec::chunk_count;
use crate::numeric::{factorial, ln, sorted_unique, NeumaierSum};
use crate::{Error, Executor, Result};

/// Largest threshold accepted by [`lambda_g`] and [`wirsing_sums`].
pub const MAX_THRESHOLD: u64 = 10_000_000;
/// Largest truncation accepted by [`euler_constant_cg`].
pub const MAX_TRUNCATION: u64 = 10_000_000;

const SUM_CHUNK: u64 = 1 << 16;

/// Values of a multiplicative function at prime powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `g(p^s) = 0` for every prime power, so `g` is the indicator of 1.
    Unit,
    /// `g(p) = k/p` and `g(p^s) = 0` for `s >= 2`. `k = 1` gives `mu^2(n)/n`.
    SquarefreeReciprocal { numerator: i64 },
    /// `g(p^s) = (k/p)^s`; the local series diverges when `|k| >= p`.
    GeometricReciprocal { numerator: i64 },
    /// `g(p) = w_p / (p - w_p)` and `g(p^s) = 0` for `s >= 2`, with `w_p`
    /// read from `counts` (absent primes have `w_p = 0`).
    ResidueCounts { counts: BTreeMap<u64, u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultFnSpec {
    pub rule: Rule,
    /// `g(p^s) = 0` for every `p <= cutoff`.
    pub cutoff: Option<u64>,
    /// Declared mean-value exponent.
    pub h: u32,
    /// Declared error scale.
    pub l_scale: f64,
}

impl MultFnSpec {
    pub fn new(rule: Rule, h: u32) -> Self {
        MultFnSpec {
            rule,
            cutoff: None,
            h,
            l_scale: 1.0,
        }
    }

    /// `mu^2(n)/n`, with `h = 1`.
    pub fn mu2_over_n() -> Self {
        Self::new(Rule::SquarefreeReciprocal { numerator: 1 }, 1)
    }

    pub fn with_cutoff(mut self, cutoff: u64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    fn cut(&self, p: u64) -> bool {
        self.cutoff.is_some_and(|y| p <= y)
    }

    /// `g(p^s)` as an exact rational. Fails when a numerator or denominator
    /// overflows `i128`.
    pub fn value(&self, p: u64, s: u32) -> Result<Ratio<i128>> {
        let zero = Ratio::from_integer(0);
        if s == 0 {
            return Ok(Ratio::from_integer(1));
        }
        if self.cut(p) {
            return Ok(zero);
        }
        let overflow = || Error::SizeCap(format!("g({p}^{s}) overflows i128"));
        match &self.rule {
            Rule::Unit => Ok(zero),
            Rule::SquarefreeReciprocal { numerator } => Ok(if s == 1 {
                Ratio::new(*numerator as i128, p as i128)
            } else {
                zero
            }),
            Rule::GeometricReciprocal { numerator } => {
                let num = (*numerator as i128).checked_pow(s).ok_or_else(overflow)?;
                let den = (p as i128).checked_pow(s).ok_or_else(overflow)?;
                Ok(Ratio::new(num, den))
            }
            Rule::ResidueCounts { counts } => {
                let w = counts.get(&p).copied().unwrap_or(0) as i128;
                Ok(if s == 1 && w > 0 {
                    Ratio::new(w, p as i128 - w)
                } else {
                    zero
                })
            }
        }
    }

    /// `g(p^s)` in floating point.
    pub fn value_f64(&self, p: u64, s: u32) -> f64 {
        if s == 0 {
            return 1.0;
        }
        if self.cut(p) {
            return 0.0;
        }
        let pf = p as f64;
        match &self.rule {
            Rule::Unit => 0.0,
            Rule::SquarefreeReciprocal { numerator } => {
                if s == 1 {
                    *numerator as f64 / pf
                } else {
                    0.0
                }
            }
            Rule::GeometricReciprocal { numerator } => libm::pow(*numerator as f64 / pf, s as f64),
            Rule::ResidueCounts { counts } => {
                let w = counts.get(&p).copied().unwrap_or(0) as f64;
                if s == 1 {
                    w / (pf - w)
                } else {
                    0.0
                }
            }
        }
    }

    /// `g(n)` from the prime-power values, using a factor table covering `n`.
    pub fn eval_f64(&self, table: &SmallestFactorTable, n: u64) -> f64 {
        let mut v = 1.0;
        table.for_each_prime_power(n, |p, e| v *= self.value_f64(p, e));
        v
    }

    /// The local factor `sum_{s >= 0} g(p^s)`.
    pub fn local_factor(&self, p: u64) -> Result<f64> {
        if self.cut(p) {
            return Ok(1.0);
        }
        let pf = p as f64;
        match &self.rule {
            Rule::Unit => Ok(1.0),
            Rule::SquarefreeReciprocal { numerator } => Ok(1.0 + *numerator as f64 / pf),
            Rule::GeometricReciprocal { numerator } => {
                if numerator.unsigned_abs() >= p {
                    return Err(Error::domain(format!(
                        "local series at p = {p} diverges: |{numerator}/{p}| >= 1"
                    )));
                }
                Ok(1.0 / (1.0 - *numerator as f64 / pf))
            }
            Rule::ResidueCounts { counts } => {
                let w = counts.get(&p).copied().unwrap_or(0) as u64;
                if w >= p {
                    return Err(Error::domain(format!("w_{p} = {w} covers every residue")));
                }
                Ok(pf / (pf - w as f64))
            }
        }
    }
}

/// `Lambda_g` on the prime powers up to `x`; zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct VonMangoldtTable {
    x: u64,
    /// `(p^s, Lambda_g(p^s))` sorted by `p^s`.
    entries: Vec<(u64, f64)>,
}

impl VonMangoldtTable {
    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn get(&self, n: u64) -> f64 {
        match self.entries.binary_search_by_key(&n, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    /// `sum_{n <= w} Lambda_g(n)`.
    pub fn partial_sum(&self, w: u64) -> f64 {
        self.entries
            .iter()
            .take_while(|e| e.0 <= w)
            .map(|e| e.1)
            .collect::<NeumaierSum>()
            .value()
    }
}

/// Solves `sum_{d | n} g(n/d) Lambda_g(d) = g(n) log n` on prime powers:
/// `Lambda_g(p^s) = s g(p^s) log p - sum_{t < s} g(p^(s-t)) Lambda_g(p^t)`.
pub fn lambda_g(g: &MultFnSpec, x: u64) -> Result<VonMangoldtTable> {
    if x > MAX_THRESHOLD {
        return Err(Error::SizeCap(format!("threshold {x} above 10^7")));
    }
    let mut entries = Vec::new();
    if x >= 2 {
        let mut lam: Vec<f64> = Vec::new();
        for p in primes_up_to(x)?.iter() {
            let logp = ln(p as f64);
            lam.clear();
            lam.push(0.0);
            let mut q = p;
            let mut s = 1u32;
            loop {
                let mut v = s as f64 * g.value_f64(p, s) * logp;
                for t in 1..s {
                    v -= g.value_f64(p, s - t) * lam[t as usize];
                }
                lam.push(v);
                entries.push((q, v));
                match q.checked_mul(p) {
                    Some(next) if next <= x => q = next,
                    _ => break,
                }
                s += 1;
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
    }
    Ok(VonMangoldtTable { x, entries })
}

/// Largest `|sum_{d | n} g(n/d) Lambda_g(d) - g(n) log n| / (1 + |g(n) log n|)`
/// over `2 <= n <= n_max`.
pub fn lambda_identity_error(g: &MultFnSpec, n_max: u64) -> Result<f64> {
    let table = lambda_g(g, n_max)?;
    if n_max < 2 {
        return Ok(0.0);
    }
    let spf = SmallestFactorTable::new(n_max)?;
    let mut worst: f64 = 0.0;
    for n in 2..=n_max {
        // only prime-power divisors d contribute
        let mut lhs = NeumaierSum::new();
        spf.for_each_prime_power(n, |p, e| {
            let mut d = 1u64;
            for _ in 0..e {
                d *= p;
                lhs.add(g.eval_f64(&spf, n / d) * table.get(d));
            }
        });
        let rhs = g.eval_f64(&spf, n) * ln(n as f64);
        worst = worst.max(libm::fabs(lhs.value() - rhs) / (1.0 + libm::fabs(rhs)));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WirsingRow {
    pub x: u64,
    /// `sum_{n <= x} g(n)`
    pub sum: f64,
    /// `sum_{n <= x} |g(n)|`
    pub abs_sum: f64,
    /// `sum / (log x)^h`
    pub ratio: f64,
}

/// Partial sums of `g` at each sample point, from one pass over a
/// smallest-factor table.
pub fn wirsing_sums<E: Executor>(exec: &E, g: &MultFnSpec, xs: &[u64]) -> Result<Vec<WirsingRow>> {
    let xs = sorted_unique(xs);
    let Some(&x_max) = xs.last() else {
        return Ok(Vec::new());
    };
    if xs[0] == 0 {
        return Err(Error::domain("thresholds must be positive"));
    }
    if x_max > MAX_THRESHOLD {
        return Err(Error::SizeCap(format!("threshold {x_max} above 10^7")));
    }
    let table = SmallestFactorTable::new(x_max)?;
    let chunks = chunk_count(x_max, SUM_CHUNK);
    let partials: Vec<Vec<(NeumaierSum, NeumaierSum)>> = exec.map_chunks(chunks, |c| {
        let lo = c as u64 * SUM_CHUNK + 1;
        let hi = (lo + SUM_CHUNK - 1).min(x_max);
        // split the chunk at sample points so every piece lies in one bucket
        let mut pieces = Vec::new();
        let mut acc = (NeumaierSum::new(), NeumaierSum::new());
        for n in lo..=hi {
            let v = g.eval_f64(&table, n);
            acc.0.add(v);
            acc.1.add(libm::fabs(v));
            if xs.binary_search(&n).is_ok() {
                pieces.push(core::mem::take(&mut acc));
            }
        }
        pieces.push(acc);
        pieces
    });
    let mut total = (NeumaierSum::new(), NeumaierSum::new());
    let mut rows = Vec::with_capacity(xs.len());
    let mut sample = xs.iter();
    for chunk in partials {
        let k = chunk.len();
        for (i, piece) in chunk.into_iter().enumerate() {
            total.0.merge(&piece.0);
            total.1.merge(&piece.1);
            if i + 1 < k {
                let x = *sample.next().expect("one piece boundary per sample point");
                rows.push(row(g.h, x, &total));
            }
        }
    }
    Ok(rows)
}

fn row(h: u32, x: u64, total: &(NeumaierSum, NeumaierSum)) -> WirsingRow {
    let sum = total.0.value();
    WirsingRow {
        x,
        sum,
        abs_sum: total.1.value(),
        ratio: sum / libm::pow(ln(x as f64), h as f64),
    }
}

/// `sum_{n <= x} g(n)` and its ratio to `(log x)^h`.
pub fn wirsing_sum<E: Executor>(exec: &E, g: &MultFnSpec, x: u64) -> Result<WirsingRow> {
    Ok(wirsing_sums(exec, g, &[x])?.remove(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerConstant {
    pub h: u32,
    pub truncation: u64,
    /// `(1/h!) prod_{p <= P0} (sum_s g(p^s)) (1 - 1/p)^h`
    pub value: f64,
    /// Estimated relative error of the truncation, extrapolating the decay
    /// `|log L_p| <= A/p^2` seen on `(P0/2, P0]`.
    pub tail_bound: f64,
}

/// Truncated Euler product for the mean-value constant `c_g`.
pub fn euler_constant_cg(g: &MultFnSpec, h: u32, truncation: u64) -> Result<EulerConstant> {
    if truncation > MAX_TRUNCATION {
        return Err(Error::SizeCap(format!("truncation {truncation} above 10^7")));
    }
    let mut log_sum = NeumaierSum::new();
    let mut decay: f64 = 0.0;
    if truncation >= 2 {
        for p in primes_up_to(truncation)?.iter() {
            let pf = p as f64;
            let term = ln(g.local_factor(p)?) + h as f64 * libm::log1p(-1.0 / pf);
            log_sum.add(term);
            if 2 * p > truncation {
                decay = decay.max(pf * pf * libm::fabs(term));
            }
        }
    }
    let tail = if truncation >= 2 { decay / truncation as f64 } else { 0.0 };
    Ok(EulerConstant {
        h,
        truncation,
        value: libm::exp(log_sum.value()) / factorial(h),
        tail_bound: libm::expm1(tail),
    })
}
