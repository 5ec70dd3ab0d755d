//! Masa-bimodule maps at matrix scale.
//!
//! Idempotent Schur multipliers are indexed by 0/1 patterns. This crate
//! provides the pattern combinatorics ([`pattern`]), exact Schur multiplier
//! norms through a Haagerup factorization SDP ([`multiplier`]), the
//! finite-grid symbol calculus ([`symbol`]) and the action on normalizers of
//! the diagonal masa ([`normalizer`]). Dense complex linear algebra lives in
//! [`linalg`].
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod linalg;
pub mod multiplier;
pub mod normalizer;
pub mod pattern;
pub mod symbol;
