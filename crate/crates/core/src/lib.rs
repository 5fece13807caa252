//! Heat kernels and bound states of a charged particle moving in a plane with a
//! uniform magnetic field and one or two Aharonov-Bohm flux lines.
//!
//! Units: ħ = μ = 1. Lengths are measured so that `D = omega_c * R^2` is the
//! dimensionless separation parameter. Vortex `a` sits at the origin and
//! vortex `b` at `(R, 0)`.
//!
//! Modules:
//! - [`specfun`]: gamma, Bessel `I`, Laguerre and hypergeometric functions.
//! - [`quad`]: adaptive quadrature on lines, half-lines, segments and boxes.
//! - [`landau`]: model parameters, bipolar points, the plane kernel and the
//!   covering-space kernel of the once-punctured plane.
//! - [`ab1`]: the one-flux kernel in integral, mode-sum and long-time forms.
//! - [`ab2`]: the two-flux kernel as a sum over alternating vortex paths.
//! - [`eigen`]: the bound state above the lowest Landau level and its
//!   two-flux correction.
//! - [`shift`]: the energy shift caused by the second flux line.
//! - [`asymlab`]: numerical checks of the two-dimensional asymptotic lemma and
//!   the confluent integral identity used by `eigen`.
//! - [`density`]: `|ψ₁|²` and `|ψ̃₂|²` grids with ring and norm summaries.
//! - [`verify`]: residual suites shared by the command-line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN. Quadrature and
// series tables keep every published digit.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]
#![allow(clippy::too_many_arguments, clippy::needless_range_loop)]

pub mod ab1;
pub mod ab2;
pub mod asymlab;
pub mod density;
pub mod eigen;
pub mod landau;
pub mod quad;
pub mod shift;
pub mod specfun;
pub mod verify;

pub use num_complex::Complex64 as C64;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] specfun::SpecFunError),
    #[error(transparent)]
    Quad(#[from] quad::QuadError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A complex value with the error estimate of the quadrature that produced it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: C64,
    pub err: f64,
}

impl Estimate {
    pub fn exact(value: C64) -> Self {
        Estimate { value, err: 0.0 }
    }
}

impl From<quad::QuadResult> for Estimate {
    fn from(r: quad::QuadResult) -> Self {
        Estimate { value: r.value, err: r.total_error() }
    }
}

pub(crate) fn cis(phase: f64) -> C64 {
    C64::new(phase.cos(), phase.sin())
}
