// Fixed-size numerical kernels index several arrays in lockstep; plain
// index loops read better there than zipped iterators.
#![allow(clippy::needless_range_loop)]

//! Numerical laboratory for robust heteroclinic cycles whose connecting
//! invariant subspaces change dimension around the cycle.
//!
//! Four reference systems in the positive orthant of R^4 are assembled in
//! Lotka-Volterra normal form from their eigenvalue parameters. The crate
//! classifies the spectrum at each equilibrium, composes the (possibly
//! non-square) transition matrices of the cycle into the scalar stability
//! index `delta`, integrates the flow in logarithmic coordinates where
//! coordinates as small as 1e-900 stay representable, and compares the
//! measured growth of the minima of `log x4` against `delta`.

pub mod analysis;
pub mod error;
pub mod integrate;
pub mod model;
pub mod presets;
pub mod spectrum;
pub mod stability;

pub use error::{Error, Result};
