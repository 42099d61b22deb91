use alloc::vec::Vec;

use super::modular::{is_prime_u128, mul_mod_u128};
use crate::{Error, Result};

const TRIAL_BOUND: u128 = 1 << 12;

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u128,
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u128 {
        self.n
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Factors narrowed to `u64`; valid whenever `n` fits a machine word.
    pub fn prime_powers_u64(&self) -> Vec<(u64, u32)> {
        self.factors.iter().map(|&(p, e)| (p as u64, e)).collect()
    }

    /// Product of the prime powers.
    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u128> {
        let mut out = alloc::vec![1u128];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho with polynomial `x^2 + c`.
fn rho_brent(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
    let m = 128u64;
    let (mut y, mut r, mut q) = (2u128, 1u64, 1u128);
    let mut g = 1u128;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod_u128(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_composite(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime_u128(n) {
        out.push(n);
        return;
    }
    // Retry with the next polynomial constant until a proper split appears.
    let mut c = 1u128;
    let d = loop {
        if let Some(d) = rho_brent(n, c) {
            break d;
        }
        c += 1;
    };
    split_composite(d, out);
    split_composite(n / d, out);
}

/// Complete factorization of `1 <= n < 2^128`: trial division to 2^12, then
/// Pollard-Brent rho with deterministically retried constants.
pub fn factorize(n: u128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut d = 2u128;
    while d < TRIAL_BOUND && d * d <= m {
        while m % d == 0 {
            primes.push(d);
            m /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if m < d * d {
            primes.push(m);
        } else {
            split_composite(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

/// [`factorize`] for a machine word; panics on 0.
pub fn factorize_u64(n: u64) -> Factorization {
    factorize(n as u128).expect("factorize_u64 called with 0")
}
