//! Numerical evidence: quantile discretization, rearrangement, exhaustive search,
//! and verification of constant sums.

pub mod brute_force;
pub mod grid;
pub mod ks;
pub mod rearrangement;
pub mod verify;

pub use brute_force::{brute_force_min_spread, BruteForceResult};
pub use grid::{discretize, QuantileGrid};
pub use rearrangement::{ra_minimize, ra_minimize_from, ra_minimize_restarts, ra_runs, OracleReport, RaOptions, RearrangementResult};
pub use verify::{verify_constant_sum, verify_transformed_sum, TransformReport, VerificationReport};
