//! Exponent algebra, scaled energy quantities, scaling checks and iteration
//! diagnostics for potential Type II blowup scenarios of the Navier–Stokes equations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod exponent_algebra;
pub mod fields;
pub mod quadrature;
pub mod quantities;
pub mod scalar;
pub mod scaling;

pub use error::{Error, Result};
pub use scalar::Scalar;

use num_rational::BigRational;

pub type ExponentParamsF64 = exponent_algebra::ExponentParams<f64>;
pub type ExponentParamsF32 = exponent_algebra::ExponentParams<f32>;
pub type ExponentParamsExact = exponent_algebra::ExponentParams<BigRational>;
pub type ConstructionF64 = exponent_algebra::Appendix1Construction<f64>;
pub type ConstructionExact = exponent_algebra::Appendix1Construction<BigRational>;
pub type SlPairF64 = exponent_algebra::SlPair<f64>;
pub type SlPairExact = exponent_algebra::SlPair<BigRational>;
pub type IterationParamsF64 = asymptotics::IterationParams<f64>;
pub type IterationParamsF32 = asymptotics::IterationParams<f32>;
