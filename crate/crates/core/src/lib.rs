//! Exact simulation of extended Wigner's-friend experiments.
//!
//! Everything is generic over [`numerics::Scalar`]; the aliases below fix
//! the scalar to exact Q(√2, √3) arithmetic or to `f64`.

pub mod analysis;
pub mod experiment;
pub mod hilbert;
pub mod measurement;
pub mod numerics;

pub use numerics::{Amplitude, FieldScalar, Scalar};

pub type ExactAmplitude = Amplitude<FieldScalar>;
pub type FloatAmplitude = Amplitude<f64>;
pub type ExactState = hilbert::StateVector<FieldScalar>;
pub type FloatState = hilbert::StateVector<f64>;
pub type ExactScenario = experiment::Scenario<FieldScalar>;
pub type FloatScenario = experiment::Scenario<f64>;
pub type ExactDistribution = experiment::Distribution<FieldScalar>;
pub type FloatDistribution = experiment::Distribution<f64>;
