//! Cycle structure of the power map x -> x^e on the multiplicative group of
//! a finite field F_q.
//!
//! The number of cycles only depends on e and the group order q - 1, so
//! every computation here works on integers: no field arithmetic is built
//! for prime powers q = p^k.

pub mod arith;
pub mod cycles;
pub mod error;
pub mod hunt;
pub mod oracle;
pub mod rational;
pub mod stats;

pub use error::{Error, Result};
