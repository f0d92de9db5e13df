//! Lie point symmetry toolkit for reaction-diffusion equations with
//! gradient-dependent diffusivity.
//!
//! The crate verifies symmetry classifications of equations of the form
//! `u_t = D(u_x) u_xx + Q(u)` (one space dimension) and
//! `u_t = div(D(|grad u|^2) grad u) + Q(u)` (two space dimensions),
//! re-derives the radial symmetry reductions of the power-law case, and
//! numerically validates exact solutions and hodograph linearizations.
//!
//! Main subsystems:
//!
//! - [`expr`]: exact-rational symbolic expression kernel with parsing,
//!   differentiation, substitution, canonical normalization, and randomized
//!   identity testing.
//! - [`jet`]: vector fields on second-order jet space, prolongation,
//!   commutators, and one-parameter group flows.
//! - [`pde`]: PDE class representations, the invariance condition, the
//!   determining system, and equivalence/form-preserving transformations.
//! - [`catalog`]: machine-readable encoding of all classified symmetry cases
//!   and the verification driver.
//! - [`reduce`]: radial reductions to ODEs, closed-form exact solutions, and
//!   hodograph linearizations.
//! - [`numerics`]: finite-difference and ODE oracles, solution transport
//!   along group flows, and the Perona-Malik image filter.
//! - [`report`]: structured run reports shared by the CLI and the examples.
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability.

pub mod catalog;
pub mod expr;
pub mod jet;
pub mod numerics;
pub mod pde;
pub mod reduce;
pub mod report;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("jet order overflow: total derivative would exceed order 2 (coordinate {coord})")]
    OrderOverflow { coord: String },
    #[error("evaluation domain error: {0}")]
    Domain(String),
    #[error("sampler exhausted its resampling budget")]
    SamplerExhausted,
    #[error("expression is not linear in {0}")]
    NotLinear(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("flow blow-up at eps={eps}: state norm exceeds {bound}")]
    Blowup { eps: f64, bound: f64 },
    #[error("profile is not monotone; cannot invert")]
    NonMonotone,
    #[error("time step collapse: {0}")]
    StepCollapse(String),
    #[error("pgm: {msg} at byte {offset}")]
    Pgm { msg: String, offset: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
