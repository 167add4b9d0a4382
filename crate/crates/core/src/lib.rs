//! Multi-copy programmable discrimination between two unknown qudit states.
//!
//! Registers A and C carry `n_A` and `n_C` copies of the unknown program
//! states `|φ₁⟩`, `|φ₂⟩`; the data register B carries `n_B` copies of one of
//! them. This crate computes, in closed form, the optimal failure probability
//! of unambiguous discrimination and the minimum-error probability between the
//! two Haar-averaged input states, and checks every closed form against a
//! dense-matrix oracle on the full `n^N`-dimensional tensor space.
//!
//! - [`combinatorics`]: partitions, hook lengths, `f^[λ]`, `d^[λ]`, binomials.
//! - [`spectrum`]: the Jordan blocks `(O_k, d^k)` and the ranks `d1`, `d2`.
//! - [`discrimination`]: the optimal strategies and their `n → ∞` limits.
//! - [`oracle`]: dense operators, an eigensolver, principal angles, POVMs.
//! - [`verify`]: the closed-form-vs-oracle certification grid.

// `!(x <= tol)` is used on purpose so that NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod discrimination;
pub mod error;
pub mod oracle;
pub mod serde_big;
pub mod spectrum;
pub mod verify;

pub use combinatorics::{HalfInteger, Partition};
pub use discrimination::{
    AsymptoticBounds, Branch, LimitTerm, MinErrorBlock, MinErrorResult, QRule, UnambiguousBlock, UnambiguousResult,
};
pub use error::{Error, Result};
pub use spectrum::{jordan_spectrum, Block, JordanSpectrum, ProblemConfig};
