use serde::Serialize;

use crate::couplings::{CouplingKind, SampleBatch};
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Frequencies at which the empirical characteristic function of the sum is compared
/// with `exp(itC)`.
pub const CF_FREQUENCIES: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub rows: usize,
    pub n_vars: usize,
    pub joint_center: f64,
    pub max_abs_deviation: f64,
    pub rel_tol: f64,
    /// Sum over coordinates of the median absolute value; robust to heavy tails.
    pub scale: f64,
    /// `rel_tol · (1 + |C| + scale)`.
    pub tolerance: f64,
    pub passed: bool,
    pub cf_deviation: f64,
    /// The batch came from a rearrangement table rather than an exact construction.
    pub approximate: bool,
}

fn median_abs(mut xs: Vec<f64>) -> f64 {
    for x in xs.iter_mut() {
        *x = x.abs();
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// `max_t |mean exp(itS) - exp(itC)|` over [`CF_FREQUENCIES`].
pub fn cf_deviation(sums: &[f64], center: f64) -> f64 {
    let n = sums.len() as f64;
    CF_FREQUENCIES
        .iter()
        .map(|&t| {
            let (re, im) = sums.iter().fold((0.0, 0.0), |(re, im), &s| (re + (t * s).cos(), im + (t * s).sin()));
            let (dr, di) = (re / n - (t * center).cos(), im / n - (t * center).sin());
            dr.hypot(di)
        })
        .fold(0.0, f64::max)
}

/// Checks that every row of `batch` sums to `center`.
pub fn verify_constant_sum<T: Scalar>(batch: &SampleBatch<T>, center: T, rel_tol: f64) -> Result<VerificationReport> {
    if batch.is_empty() {
        return domain("cannot verify an empty batch");
    }
    if !(rel_tol >= 0.0) {
        return domain(format!("relative tolerance {rel_tol} must be nonnegative"));
    }
    let c = center.to_f64_lossy();
    let sums: Vec<f64> = batch.row_sums().into_iter().map(|s| s.to_f64_lossy()).collect();
    let max_abs_deviation = sums.iter().map(|s| (s - c).abs()).fold(0.0, f64::max);
    let scale: f64 = (0..batch.n_vars)
        .map(|j| median_abs(batch.column(j).into_iter().map(|x| x.to_f64_lossy()).collect()))
        .sum();
    let tolerance = rel_tol * (1.0 + c.abs() + scale);
    Ok(VerificationReport {
        rows: batch.len(),
        n_vars: batch.n_vars,
        joint_center: c,
        max_abs_deviation,
        rel_tol,
        scale,
        tolerance,
        passed: max_abs_deviation <= tolerance,
        cf_deviation: cf_deviation(&sums, c),
        approximate: batch.kind == CouplingKind::ScaleMixtureRearranged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformReport {
    /// `K = f(C)`.
    pub constant: f64,
    pub max_rel_deviation: f64,
    pub rel_tol: f64,
    pub passed: bool,
}

/// Checks that `f(row sum)` is constant at `f(C)`, relative to `max(1, |f(C)|)`.
pub fn verify_transformed_sum<T: Scalar>(
    batch: &SampleBatch<T>,
    center: T,
    f: impl Fn(f64) -> f64,
    rel_tol: f64,
) -> Result<TransformReport> {
    if batch.is_empty() {
        return domain("cannot verify an empty batch");
    }
    let k = crate::couplings::transform_center(&f, center.to_f64_lossy());
    if !k.is_finite() {
        return domain(format!("f(C) = {k} is not finite"));
    }
    let denom = k.abs().max(1.0);
    let max_rel_deviation = batch
        .row_sums()
        .into_iter()
        .map(|s| (f(s.to_f64_lossy()) - k).abs() / denom)
        .fold(0.0, f64::max);
    Ok(TransformReport { constant: k, max_rel_deviation, rel_tol, passed: max_rel_deviation <= rel_tol })
}
