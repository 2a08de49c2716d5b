//! Numerical tools for the geometry of polynomial critical points.
//!
//! * [`poly`]: complex polynomials, Aberth–Ehrlich root finding, simplicity tests.
//! * [`critgeo`]: critical radius, Gauss–Lucas, Sendov and the `|2z - 1| <= 1` disk check.
//! * [`tracker`]: continuation of a critical point of `Q(z, u) = (z - u) q(z)` as `u` moves.
//! * [`surface`]: branch locus, projection `u = w + q(w)/q'(w)`, sheets at infinity, monodromy.
//! * [`experiments`]: the ratio function `f`, blow-up scans, boundary comparison and
//!   the search for polynomials of maximal critical radius.

pub mod critgeo;
pub mod error;
pub mod experiments;
pub mod poly;
pub mod surface;
pub mod tracker;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{is_simple, Polynomial, RootConfig, RootList};
