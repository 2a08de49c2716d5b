use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("polynomial degree {degree} is below the required minimum {required}")]
    DegreeTooLow { degree: usize, required: usize },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("point {point} is not a zero of the polynomial (|p| = {value:e})")]
    NotAZero { point: Complex64, value: f64 },

    #[error("root {root} lies outside the closed unit disk")]
    RootOutsideDisk { root: Complex64 },

    #[error("multiple roots or multiple critical points: {0}")]
    DegenerateConfiguration(String),

    #[error("second derivative vanishes at zeta = {zeta}, u = {u} (branch point)")]
    BranchPointSingularity { zeta: Complex64, u: Complex64 },

    #[error("step size fell below the floor at t = {t} (u = {u}); path passes near a branch point")]
    PathNearBranchPoint { t: f64, u: Complex64 },

    #[error("start value {zeta} is not a critical point of Q(., {u}) (scaled residual {residual:e})")]
    StartNotCritical { zeta: Complex64, u: Complex64, residual: f64 },

    #[error("corrector failed to converge at t = {t}")]
    CorrectorFailure { t: f64 },

    #[error("sheets {first} and {second} collided at t = {t}")]
    SheetCollision { first: usize, second: usize, t: f64 },

    #[error("projection is singular at w = {w}: q'(w) vanishes")]
    ProjectionSingular { w: Complex64 },

    #[error("loop is not closed at the basepoint: {0}")]
    LoopNotClosed(String),

    #[error("path comes within {distance:e} of the branch projection {point} (required clearance {clearance:e})")]
    InsufficientClearance { point: Complex64, distance: f64, clearance: f64 },

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("quadrature did not converge (last change {change:e})")]
    QuadratureNotConverged { change: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
