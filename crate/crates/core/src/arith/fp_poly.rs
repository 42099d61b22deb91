//! Dense polynomials over a prime field `F_p`, coefficients low-to-high.
//!
//! Every function expects normalized inputs (no trailing zero
//! coefficients, every coefficient below `p`) and returns normalized output.
//! The zero polynomial is the empty vector.

use alloc::vec;
use alloc::vec::Vec;

use super::modular::{inv_mod, mul_mod};

pub type Poly = Vec<u64>;

pub fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub fn degree(f: &[u64]) -> Option<usize> {
    f.len().checked_sub(1)
}

pub fn x() -> Poly {
    vec![0, 1]
}

pub fn add(f: &[u64], g: &[u64], p: u64) -> Poly {
    let n = f.len().max(g.len());
    let out = (0..n)
        .map(|i| {
            let a = f.get(i).copied().unwrap_or(0);
            let b = g.get(i).copied().unwrap_or(0);
            ((a as u128 + b as u128) % p as u128) as u64
        })
        .collect();
    trim(out)
}

pub fn sub(f: &[u64], g: &[u64], p: u64) -> Poly {
    let n = f.len().max(g.len());
    let out = (0..n)
        .map(|i| {
            let a = f.get(i).copied().unwrap_or(0);
            let b = g.get(i).copied().unwrap_or(0);
            ((a as u128 + (p - b) as u128) % p as u128) as u64
        })
        .collect();
    trim(out)
}

pub fn mul(f: &[u64], g: &[u64], p: u64) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            let t = mul_mod(a, b, p);
            out[i + j] = ((out[i + j] as u128 + t as u128) % p as u128) as u64;
        }
    }
    trim(out)
}

/// Quotient and remainder of `f` by nonzero `g`.
pub fn div_rem(f: &[u64], g: &[u64], p: u64) -> (Poly, Poly) {
    assert!(!g.is_empty(), "division by the zero polynomial");
    let dg = g.len() - 1;
    if f.len() < g.len() {
        return (Vec::new(), f.to_vec());
    }
    let lead_inv = inv_mod(g[dg], p).expect("leading coefficient invertible mod p");
    let mut r = f.to_vec();
    let mut q = vec![0u64; f.len() - dg];
    for i in (dg..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        let factor = mul_mod(c, lead_inv, p);
        q[i - dg] = factor;
        for (j, &gj) in g.iter().enumerate() {
            let t = mul_mod(factor, gj, p);
            let idx = i - dg + j;
            r[idx] = ((r[idx] as u128 + (p - t) as u128) % p as u128) as u64;
        }
    }
    r.truncate(dg);
    (trim(q), trim(r))
}

pub fn rem(f: &[u64], g: &[u64], p: u64) -> Poly {
    div_rem(f, g, p).1
}

pub fn make_monic(f: &[u64], p: u64) -> Poly {
    match f.last() {
        None => Vec::new(),
        Some(&lead) => {
            let inv = inv_mod(lead, p).expect("nonzero leading coefficient");
            f.iter().map(|&c| mul_mod(c, inv, p)).collect()
        }
    }
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd(f: &[u64], g: &[u64], p: u64) -> Poly {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

pub fn mul_mod_poly(f: &[u64], g: &[u64], modulus: &[u64], p: u64) -> Poly {
    rem(&mul(f, g, p), modulus, p)
}

/// `base^exp mod modulus`.
pub fn pow_mod_poly(base: &[u64], mut exp: u128, modulus: &[u64], p: u64) -> Poly {
    let mut acc = rem(&[1], modulus, p);
    let mut b = rem(base, modulus, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_poly(&acc, &b, modulus, p);
        }
        b = mul_mod_poly(&b, &b, modulus, p);
        exp >>= 1;
    }
    acc
}

pub fn derivative(f: &[u64], p: u64) -> Poly {
    let out = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
        .collect();
    trim(out)
}

pub fn eval(f: &[u64], at: u64, p: u64) -> u64 {
    f.iter()
        .rev()
        .fold(0u64, |acc, &c| ((mul_mod(acc, at, p) as u128 + c as u128) % p as u128) as u64)
}

/// Irreducibility by distinct-degree testing: a polynomial of degree `n`
/// is irreducible iff it shares no factor with `X^(p^d) - X` for every
/// `d <= n/2`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = match degree(f) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let f = make_monic(f, p);
    let mut h = x();
    for _ in 1..=n / 2 {
        h = pow_mod_poly(&h, p as u128, &f, p);
        let g = gcd(&f, &sub(&h, &x(), p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Product of the distinct linear factors of `f`: `gcd(f, X^p - X)`.
pub fn linear_part(f: &[u64], p: u64) -> Poly {
    let f = make_monic(f, p);
    let xp = pow_mod_poly(&x(), p as u128, &f, p);
    gcd(&f, &sub(&xp, &x(), p), p)
}

/// Roots of a monic squarefree polynomial that splits into distinct linear
/// factors over `F_p`, found by equal-degree splitting with the shifts
/// `X + 0, X + 1, ...` in turn. Output is sorted.
pub fn split_linear_roots(g: &[u64], p: u64) -> Vec<u64> {
    let mut roots = Vec::new();
    let mut stack = vec![make_monic(g, p)];
    while let Some(h) = stack.pop() {
        match h.len() {
            0 | 1 => continue,
            2 => {
                roots.push((p - h[0]) % p);
                continue;
            }
            _ => {}
        }
        if p == 2 {
            roots.extend((0..2).filter(|&a| eval(&h, a, p) == 0));
            continue;
        }
        let mut shift = 0u64;
        loop {
            let base = vec![shift % p, 1];
            let t = pow_mod_poly(&base, ((p - 1) / 2) as u128, &h, p);
            let d = gcd(&h, &sub(&t, &[1], p), p);
            if d.len() > 1 && d.len() < h.len() {
                let (q, _) = div_rem(&h, &d, p);
                stack.push(d);
                stack.push(make_monic(&q, p));
                break;
            }
            shift += 1;
            assert!(shift < p, "equal-degree splitting exhausted all shifts");
        }
    }
    roots.sort_unstable();
    roots
}

/// `X^exp` reduced modulo `modulus`, with `exp` possibly near 2^64.
pub fn x_pow_mod(exp: u128, modulus: &[u64], p: u64) -> Poly {
    pow_mod_poly(&x(), exp, modulus, p)
}

/// Evaluate `f` at every element of `F_p` by Horner; helper for scans.
pub fn count_zeros_by_scan(f: &[u64], p: u64) -> u64 {
    (0..p).filter(|&a| eval(f, a, p) == 0).count() as u64
}
