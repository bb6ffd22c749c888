//! Numerics for coherent states on spheres built from heat kernel
//! analytic continuation.
//!
//! The crate is generic over the scalar type through [`scalar::Real`]
//! (implemented for `f32` and `f64`); the type aliases at the root fix the
//! common double precision choices.

pub mod asymptotics;
pub mod coherent;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod heatkernel;
pub mod operator_lab;
pub mod phase_space;
pub mod scalar;

mod quadrature;
mod series;

pub use error::{Error, Result};

/// Double precision heat kernel.
pub type HeatKernel64 = heatkernel::HeatKernel<f64>;
/// Double precision spectral series.
pub type SpectralSeries64 = heatkernel::SpectralSeries<f64>;
/// Double precision evaluation controls.
pub type EvalConfig64 = heatkernel::EvalConfig<f64>;
/// Double precision unit conventions.
pub type PhysicalParams64 = geometry::PhysicalParams<f64>;
/// Double precision cotangent-bundle point.
pub type PhasePoint64 = geometry::PhasePoint<f64>;
/// Double precision coherent-state label.
pub type ComplexSpherePoint64 = geometry::ComplexSpherePoint<f64>;
/// Double precision central lattice part.
pub type PrincipalPart64 = asymptotics::PrincipalPart<f64>;
/// Double precision flat coherent-state label.
pub type FlatLabel64 = coherent::FlatLabel<f64>;
/// Double precision truncated Fourier basis.
pub type TruncatedBasis64 = operator_lab::TruncatedBasis<f64>;
