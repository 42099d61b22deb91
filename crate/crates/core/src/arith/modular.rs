use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::ToPrimitive;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[inline]
fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

/// `a * b mod m` for moduli up to 2^128. Uses a double-and-add ladder once
/// the modulus no longer fits a machine word.
pub fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let mut a = a % m;
    let mut b = b % m;
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_u128(acc, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    acc
}

pub fn pow_mod_u128(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Least non-negative residue of a big integer.
pub fn reduce_bigint(value: &BigInt, m: u64) -> u64 {
    let r = value.mod_floor(&BigInt::from(m));
    debug_assert!(r.sign() != Sign::Minus);
    r.to_u64().unwrap()
}

const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn strong_probable_prime(n: u128, a: u128) -> bool {
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mut x = pow_mod_u128(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u128(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    is_prime_u128(n as u128)
}

/// Miller-Rabin with the first thirteen prime bases. Deterministic below
/// 3.3 * 10^24; a strong probable-prime test above that.
pub fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        let p = p as u128;
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    WITNESSES
        .iter()
        .all(|&a| strong_probable_prime(n, a as u128))
}

/// Multiplicative order of `a` in a group of order `group_order` whose prime
/// factorization is `factors`. `is_one(e)` must report whether `a^e` is the
/// identity.
pub(crate) fn order_by_stripping(
    group_order: u64,
    factors: &[(u64, u32)],
    mut is_one: impl FnMut(u64) -> bool,
) -> u64 {
    let mut t = group_order;
    for &(r, e) in factors {
        for _ in 0..e {
            if t % r == 0 && is_one(t / r) {
                t /= r;
            } else {
                break;
            }
        }
    }
    t
}

/// Multiplicative order of `a` modulo the prime `p`. Returns `None` when
/// `p | a`.
pub fn order_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let factors = super::factorize_u64(p - 1).prime_powers_u64();
    Some(order_by_stripping(p - 1, &factors, |e| pow_mod(a, e, p) == 1))
}
