//! Feynman path integrals for the Schrödinger equation with a magnetic
//! field: exact Dyson series in Fourier space, Wiener-integral Monte Carlo
//! with Stratonovich line integrals, and renormalization experiments for
//! constant fields.
//!
//! The measure, path, stochastic-integral and Dyson layers are generic over
//! [`Real`] (`f32` or `f64`). Monte Carlo, renormalization and the grid
//! solver work in `f64`. The aliases below fix the generic types to `f64`.

pub mod cameron_martin;
pub mod dyson;
pub mod error;
pub mod experiment;
pub mod feynman_mc;
pub mod fourier_measure;
pub mod reference_solver;
pub mod renormalization;
pub mod scalar;
pub mod stoch_integrals;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Measure = fourier_measure::PointMassMeasure<f64>;
pub type FourierPotential = fourier_measure::VectorPotentialFourier<f64>;
pub type LinearPotential = fourier_measure::LinearVectorPotential<f64>;
pub type Params = fourier_measure::PhysicalParams<f64>;
pub type Path = cameron_martin::GridPath<f64>;
pub type ComplexPath = cameron_martin::GridPath<num_complex::Complex<f64>>;
pub type Packet = dyson::WavePacket<f64>;
pub type Term = dyson::DysonTerm<f64>;
