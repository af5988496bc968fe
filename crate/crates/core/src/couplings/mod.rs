//! Joint laws with prescribed marginals and almost surely constant sums.

mod batch;
mod equicorrelation;
pub mod linalg;
mod polygon;
mod sampling;

pub use batch::{Approximation, CouplingKind, MatrixBatch, SampleBatch};
pub use equicorrelation::EquicorrelationPlan;
pub use polygon::{elliptical_jm_covariance, polygon_unit_vectors, PolygonCoupling};
pub use sampling::{
    sample_cm_scale_mixture, sample_jm_elliptical, sample_jm_slash, sample_matrix_variate_cm, transform_center,
    SharedMixingPlan, SharedScalar,
};
