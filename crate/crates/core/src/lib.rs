//! Random d-regular 0/1 matrices and the smallest singular value of their shifts.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`] and [`enumerate`]: the [`RegularMatrix`] type, the shifted linear maps
//!   `x ↦ (M − zI)x`, and exhaustive enumeration of all d-regular matrices for tiny `n`.
//! * [`sampler`]: an approximately uniform sampler driven by the 2×2 switch chain.
//! * [`spectra`] and [`exact`]: extreme singular values of `M − zI`, the distance-to-span
//!   verifier, and exact-arithmetic certificates for suspicious spectra.
//! * [`taxonomy`] and [`disc`]: the steep / sloping / almost-constant vector classes.
//! * [`events`]: expansion, disjointness and zero-minor events on a fixed matrix.
//! * [`anticoncentration`]: exact and Monte Carlo Littlewood–Offord ball probabilities.
//! * [`harness`]: reproducible Monte Carlo campaigns tying everything together.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anticoncentration;
pub mod disc;
pub mod enumerate;
pub mod error;
pub mod events;
pub mod exact;
pub mod harness;
pub mod matrix;
pub mod sampler;
pub mod spectra;
pub mod taxonomy;
pub mod vector;

pub use error::{Error, Result};
pub use matrix::RegularMatrix;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
