//! Numerical toolkit for spectral lower bounds over covers.
//!
//! The crate is `no_std` (it only needs `alloc`) and contains the pure
//! numerical parts:
//!
//! * [`geometry`]: warped-product metric of a hyperbolic tube and the
//!   degeneration schedule `ε ~ e^{-2R}`, `ρ ~ e^{-R}`.
//! * [`torus_modes`]: closed-form spectrum of the flat twisted torus fibres.
//! * [`sturm_liouville`]: 1-D self-adjoint eigenproblems solved by symmetric
//!   finite differences and by Prüfer shooting.
//! * [`tube_spectrum`]: per-mode boundary value problems of a truncated tube
//!   and the `λ ≥ 1` threshold check.
//! * [`dissection`]: the cover lower-bound formulas and their bookkeeping.
//! * [`discrete_hodge`]: finite graded complexes on circles and intervals used
//!   to check the harmonic/exact/coexact splitting by brute force.
//! * [`ode_compare`]: verifiers for the Riccati comparison and growth bounds of
//!   `-a'' + q a = 0` with `q > k²`.
//!
//! IO, file formats and the command line live in the companion
//! `spectral-bounds-cli` crate.
#![no_std]

extern crate alloc;

pub mod discrete_hodge;
pub mod dissection;
mod error;
pub mod geometry;
pub mod ode_compare;
mod rk4;
pub mod sturm_liouville;
pub mod torus_modes;
pub mod tube_spectrum;

pub use error::{Error, Result};
