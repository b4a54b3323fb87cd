//! Special functions, quadrature and the random-stream contract shared by
//! the rest of the crate.

mod dilog;
mod harmonic;
mod quadrature;
mod rng;
mod zeta;

pub use dilog::dilog;
pub use harmonic::{harmonic, HarmonicTable};
pub use quadrature::{integrate, integrate_with_error, QuadratureSpec, Upper};
pub use rng::RngStream;
pub use zeta::{zeta_int, ZetaConstants};
