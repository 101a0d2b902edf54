//! Spectral toolkit for Lévy-driven random fields.
//!
//! The crate simulates Lévy white noise from a characteristic triplet, solves
//! linear CARMA-field equations `p(D) s = q(D) L̇` and semilinear equations
//! `p(D) s = g(·, s) + L̇` on periodic grids, and measures regularity through
//! Littlewood–Paley blocks and weighted Besov norms.
//!
//! Module map:
//!
//! - [`levy_measure`]: the jump measure ν and its moment integrals.
//! - [`levy_noise`]: triplets, the Lévy symbol, noise sampling, weight
//!   functions and existence checks.
//! - [`poly_multiplier`]: multivariate polynomials and rational symbols.
//! - [`grid_field`]: periodic grids, fields, transforms, norms and file I/O.
//! - [`lp_besov`]: dyadic partitions, blocks and Besov norms.
//! - [`linear_solver`]: the Fourier-multiplier solve and its diagnostics.
//! - [`semilinear_solver`]: contraction certificates and Picard iteration.

// Validation uses `!(x > 0.0)` so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod defaults;
pub mod error;
pub mod grid_field;
pub mod levy_measure;
pub mod levy_noise;
pub mod linear_solver;
pub mod lp_besov;
pub mod poly_multiplier;
pub mod quadrature;
pub mod semilinear_solver;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
