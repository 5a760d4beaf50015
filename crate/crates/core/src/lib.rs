//! Exact census and brute-force audit of degree `p^l` extensions of p-adic
//! fields that have no intermediate fields.
//!
//! The crate evaluates the closed counting formulas ([`census`]), builds the
//! matrix groups that occur as Galois groups of normal closures ([`groups`]),
//! reconstructs the relevant `F_p[H]`-modules explicitly and enumerates their
//! irreducible submodules ([`modlab`]), and computes ramification data and
//! discriminant exponents together with a cross-validation audit ([`ramify`]).

pub mod arith;
pub mod census;
pub mod error;
pub mod ffield;
pub mod groups;
pub mod linalg;
pub mod modlab;
pub mod ramify;

pub use error::{Error, Result};
