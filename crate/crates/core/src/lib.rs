//! Wick-renormalized Gibbs measures for the 2-d defocusing nonlinear Schrödinger
//! equation: Gaussian free field sampling, Wick calculus, renormalized energies,
//! Gibbs samplers, the truncated Hamiltonian flow, and a Dirichlet-square variant.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! `f64`, which is what the command line tool and the test suites use.
// NaN inputs must fail validation, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain_spectral;
pub mod dynamics;
pub mod error;
pub mod gibbs;
pub mod model;
pub mod scalar;
pub mod torus_field;
pub mod wick_functionals;
pub mod wickpoly;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

/// Torus field with `f64` amplitudes.
pub type Field = torus_field::SpectralField<f64>;
/// `γ_{s,N}` with `f64` coefficients.
pub type Kernel = torus_field::CovarianceKernel<f64>;
/// Gaussian noise with `f64` components.
pub type Noise = torus_field::NoiseVector<f64>;
/// `f64` Wick context.
pub type Context = wickpoly::WickContext<f64>;
/// `f64` evaluator of `G_N` and `F_N`.
pub type Evaluator = wick_functionals::WickEvaluator<f64>;
/// `f64` Wick model on the Dirichlet square.
pub type DirichletModel = domain_spectral::DirichletModel<f64>;
/// `f64` field on the Dirichlet square.
pub type DomainField = domain_spectral::DomainField<f64>;
