//! Numerical workbench for singular integral operators on discretized
//! closed boundaries in R^2 and R^3: Riesz transforms, Cauchy-Clifford
//! operators, layer potentials, the Semmes kernel decomposition,
//! spherical-harmonic kernel expansion, and discrete regularity
//! seminorms.

pub mod boundary;
pub mod clifford;
pub mod error;
pub mod metrics;
pub mod operators;
pub mod poly;
pub mod report;

pub use error::{Error, Result};

/// Double-precision multivector, the workhorse of the operator modules.
pub type Mv = clifford::Multivector<f64>;
/// Single-precision multivector.
pub type Mv32 = clifford::Multivector<f32>;
/// Exact-rational homogeneous polynomial, used by all symbolic paths.
pub type RationalPoly = poly::HomogeneousPoly<num::BigRational>;
/// Floating-point homogeneous polynomial, used on evaluation hot paths.
pub type RealPoly = poly::HomogeneousPoly<f64>;
