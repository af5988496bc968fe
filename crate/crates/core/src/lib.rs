//! Joint and complete mixability: verdicts with replayable certificates, constant-sum
//! couplings for elliptical, slash and matrix-variate families, and rearrangement
//! evidence on discretized marginals.
//!
//! Couplings and the rearrangement oracle are generic over [`Scalar`] (`f32`, `f64`);
//! the scale inequality also accepts exact types such as `BigRational`. The aliases
//! below fix the common `f64` instantiation.

pub mod cli;
pub mod couplings;
pub mod distributions;
pub mod error;
pub mod generators;
pub mod io;
pub mod mixability;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod special;

pub use couplings::{CouplingKind, EquicorrelationPlan, MatrixBatch, PolygonCoupling, SampleBatch};
pub use distributions::{DiscreteLaw, UnivariateFamily};
pub use error::{Error, Result};
pub use generators::CharacteristicGenerator;
pub use mixability::{Certificate, MixabilityVerdict, Verdict};
pub use oracle::{QuantileGrid, RaOptions, RearrangementResult};
pub use scalar::Scalar;

pub type SampleBatch64 = SampleBatch<f64>;
pub type MatrixBatch64 = MatrixBatch<f64>;
pub type PolygonCoupling64 = PolygonCoupling<f64>;
pub type EquicorrelationPlan64 = EquicorrelationPlan<f64>;
pub type QuantileGrid64 = QuantileGrid<f64>;
pub type RearrangementResult64 = RearrangementResult<f64>;
