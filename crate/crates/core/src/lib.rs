//! The harmonic descent Markov chain, its regenerative balls-in-boxes
//! representation driven by the subordinator with Lévy measure
//! `ν(dx) = e^{-x}/(1-e^{-x}) dx`, and the overshoot numerics behind the
//! hitting-probability limit `h_i / (ζ(2) i)`.
//!
//! Every quantity is available along at least two independent routes
//! (closed form, quadrature, exact dynamic programming, Monte Carlo) so the
//! routes can be checked against one another.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod composition;
mod error;
pub mod numerics;
pub mod renewal;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{HarmonicTable, QuadratureSpec, RngStream, ZetaConstants};
