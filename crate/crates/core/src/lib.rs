//! Exact arithmetic for the divisibility set of a quotient of linear recurrences.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every algorithm:
//! prime tables, factorization, finite fields, integer recurrences, integer
//! polynomials, multiplicative functions, residue sieves, and the counting
//! pipeline for `{ n <= x : G(n) != 0, F(n)/G(n) in Z[1/S] }`.
//!
//! Work that can be split into independent ranges goes through an
//! [`Executor`]. [`Sequential`] runs everything on the calling thread; the
//! `recdiv` companion crate provides a thread-pool executor. Chunk boundaries
//! never depend on the executor, so results are identical either way.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
mod error;
mod exec;
pub mod ffzeros;
pub mod numeric;
pub mod poly;
pub mod quotient;
pub mod recurrence;
pub mod sieve;
pub mod wirsing;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
