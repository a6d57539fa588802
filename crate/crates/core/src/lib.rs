//! Computational toolkit for the universal vectorial extension `G` of an
//! elliptic curve (and products `G^g`), its maximal compact subgroup `C`,
//! and the intersection of algebraic varieties with `C`.
//!
//! The crate is `no_std` and only needs `alloc`. Floating point functions go
//! through `libm` (via `num-traits`), exact arithmetic through `num-bigint`
//! and `num-rational`.
//!
//! Module map:
//!
//! * [`elliptic`] — period lattices, quasi-periods, `℘`, `℘′`, `ζ`.
//! * [`extension`] — the `ℙ⁴` model of `G`, exponential and logarithm, Betti
//!   coordinates, the compact subgroup, group law through the exponential.
//! * [`variety`] — multiprojective polynomial systems on `G^g`.
//! * [`solver`] — zeros of a variety on the Betti torus, torsion and rational
//!   subtorus detection.
//! * [`exact`] — `ℚ(√D)`, the matrix embeddings `A(α)`, `B(α)`, and exact
//!   rank checks for the block-matrix rank lemmas.
//! * [`bounds`] — pfaffian format bookkeeping and the closed-form bound on
//!   isolated points.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bounds;
pub mod elliptic;
mod error;
pub mod exact;
pub mod extension;
mod linalg;
pub mod ratapprox;
pub mod solver;
pub mod variety;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Double precision complex number used throughout the numerical modules.
pub type C64 = Complex64;
