//! Integer, modular, prime and finite-field arithmetic.

mod factor;
mod field;
pub mod fp_poly;
mod modular;
mod primes;

pub use factor::{factorize, factorize_u64, Factorization};
pub use field::{field_make, FieldElement, FiniteField, MAX_EXTENSION_DEGREE};
pub use modular::{
    gcd_u64, inv_mod, is_prime, is_prime_u128, mul_mod, mul_mod_u128, order_mod, pow_mod,
    pow_mod_u128, reduce_bigint,
};
pub(crate) use modular::order_by_stripping;
pub use primes::{primes_up_to, primes_up_to_with, sieve_segment, PrimeTable, SmallestFactorTable};
