use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fp_poly;
use super::modular::{is_prime, mul_mod, order_by_stripping};
use super::factorize_u64;
use crate::{Error, Result};

/// Largest supported extension degree.
pub const MAX_EXTENSION_DEGREE: usize = 12;

const IRREDUCIBLE_SEARCH_BUDGET: usize = 100_000;

/// `F_q` with `q = p^k`, realised as `F_p[X] / (modulus)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    k: usize,
    q: u64,
    modulus: Vec<u64>,
    seed: Option<u64>,
    group_factors: Vec<(u64, u32)>,
}

/// An element of a [`FiniteField`]: coefficients of a polynomial of degree
/// below `k`, low-to-high. Unused slots are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    rep: [u64; MAX_EXTENSION_DEGREE],
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64; MAX_EXTENSION_DEGREE] {
        &self.rep
    }
}

/// Builds `F_{p^k}`. For `k = 1` the modulus is `X`; otherwise a monic
/// irreducible of degree `k` is drawn from a ChaCha stream seeded by `seed`.
pub fn field_make(p: u64, k: usize, seed: u64) -> Result<FiniteField> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if k == 0 || k > MAX_EXTENSION_DEGREE {
        return Err(Error::domain(format!(
            "extension degree {k} outside 1..={MAX_EXTENSION_DEGREE}"
        )));
    }
    let q = p
        .checked_pow(k as u32)
        .ok_or_else(|| Error::domain(format!("{p}^{k} does not fit in 64 bits")))?;
    if k == 1 {
        return FiniteField::with_modulus(p, alloc::vec![0, 1], None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..IRREDUCIBLE_SEARCH_BUDGET {
        let mut f: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
        if f[0] == 0 {
            continue;
        }
        f.push(1);
        if fp_poly::is_irreducible(&f, p) {
            let mut field = FiniteField::with_modulus(p, f, Some(seed))?;
            field.q = q;
            return Ok(field);
        }
    }
    Err(Error::Budget(format!(
        "no irreducible of degree {k} over F_{p} in {IRREDUCIBLE_SEARCH_BUDGET} draws"
    )))
}

impl FiniteField {
    /// Field from an explicit monic modulus (low-to-high). The modulus must be
    /// `X` for prime fields or irreducible of degree `<= 12` otherwise.
    pub fn with_modulus(p: u64, modulus: Vec<u64>, seed: Option<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        let modulus = fp_poly::trim(modulus);
        let k = match fp_poly::degree(&modulus) {
            Some(k) if k >= 1 => k,
            _ => return Err(Error::domain("modulus must have positive degree")),
        };
        if k > MAX_EXTENSION_DEGREE {
            return Err(Error::domain(format!(
                "extension degree {k} exceeds {MAX_EXTENSION_DEGREE}"
            )));
        }
        if modulus[k] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::domain("modulus must be monic with reduced coefficients"));
        }
        if k == 1 && modulus[0] != 0 {
            return Err(Error::domain("prime fields use the modulus X"));
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::domain("modulus is reducible"));
        }
        let q = p
            .checked_pow(k as u32)
            .ok_or_else(|| Error::domain(format!("{p}^{k} does not fit in 64 bits")))?;
        let group_factors = factorize_u64(q - 1).prime_powers_u64();
        Ok(FiniteField {
            p,
            k,
            q,
            modulus,
            seed,
            group_factors,
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Seed used to draw the modulus, if it was drawn.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Prime factorization of `q - 1`.
    pub fn group_order_factors(&self) -> &[(u64, u32)] {
        &self.group_factors
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            rep: [0; MAX_EXTENSION_DEGREE],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let mut e = self.zero();
        e.rep[0] = n.rem_euclid(self.p as i64) as u64;
        e
    }

    /// Element from coefficients low-to-high; must have at most `k` entries,
    /// each below `p`.
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.k {
            return Err(Error::domain(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.k
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::domain(format!("coefficient {c} not reduced mod {}", self.p)));
        }
        let mut e = self.zero();
        e.rep[..coeffs.len()].copy_from_slice(coeffs);
        Ok(e)
    }

    /// Element whose coefficients are the base-`p` digits of `index < q`.
    pub fn element_from_index(&self, mut index: u64) -> FieldElement {
        debug_assert!(index < self.q);
        let mut e = self.zero();
        for slot in e.rep.iter_mut().take(self.k) {
            *slot = index % self.p;
            index /= self.p;
        }
        e
    }

    /// Inverse of [`FiniteField::element_from_index`].
    pub fn index_of(&self, e: &FieldElement) -> u64 {
        e.rep[..self.k]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c)
    }

    /// Coefficient vector of length `k`.
    pub fn coefficients(&self, e: &FieldElement) -> Vec<u64> {
        e.rep[..self.k].to_vec()
    }

    pub fn is_zero(&self, e: &FieldElement) -> bool {
        e.rep.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut out = self.zero();
        for i in 0..self.k {
            out.rep[i] = ((a.rep[i] as u128 + b.rep[i] as u128) % self.p as u128) as u64;
        }
        out
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let mut out = self.zero();
        for i in 0..self.k {
            out.rep[i] = (self.p - a.rep[i]) % self.p;
        }
        out
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        let k = self.k;
        if k == 1 {
            let mut out = self.zero();
            out.rep[0] = mul_mod(a.rep[0], b.rep[0], p);
            return out;
        }
        let mut wide = [0u64; 2 * MAX_EXTENSION_DEGREE - 1];
        for i in 0..k {
            if a.rep[i] == 0 {
                continue;
            }
            for j in 0..k {
                let t = mul_mod(a.rep[i], b.rep[j], p);
                wide[i + j] = ((wide[i + j] as u128 + t as u128) % p as u128) as u64;
            }
        }
        // reduce with the monic modulus, top degree first
        for top in (k..2 * k - 1).rev() {
            let c = wide[top];
            if c == 0 {
                continue;
            }
            wide[top] = 0;
            for j in 0..k {
                let t = mul_mod(c, self.modulus[j], p);
                let idx = top - k + j;
                wide[idx] = ((wide[idx] as u128 + (p - t) as u128) % p as u128) as u64;
            }
        }
        let mut out = self.zero();
        out.rep[..k].copy_from_slice(&wide[..k]);
        out
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = *a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(Error::domain("zero has no inverse"));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Smallest `t >= 1` with `a^t = 1`, found by stripping prime factors of
    /// `q - 1` from the group order.
    pub fn multiplicative_order(&self, a: &FieldElement) -> Result<u64> {
        if self.is_zero(a) {
            return Err(Error::domain("zero has no multiplicative order"));
        }
        let one = self.one();
        Ok(order_by_stripping(self.q - 1, &self.group_factors, |e| {
            self.pow(a, e) == one
        }))
    }

    /// The first element, in index order, that generates `F_q^*`.
    pub fn primitive_element(&self) -> FieldElement {
        (1..self.q)
            .map(|i| self.element_from_index(i))
            .find(|e| self.multiplicative_order(e).unwrap() == self.q - 1)
            .expect("the multiplicative group of a finite field is cyclic")
    }

    /// Uniform nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.element_from_index(rng.gen_range(1..self.q))
    }
}
