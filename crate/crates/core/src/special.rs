//! Thin wrappers around the special functions the families need.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use libm::erfc;
use statrs::function::erf::erfc_inv;

pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
#[inline]
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal quantile; `p` must lie in (0, 1).
///
/// The `erfc_inv` starting value is polished by one Newton step on whichever tail
/// is computed without cancellation.
pub fn normal_quantile(p: f64) -> f64 {
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    let residual = if x <= 0.0 { normal_cdf(x) - p } else { (1.0 - p) - normal_sf(x) };
    let density = normal_pdf(x);
    if density > 0.0 {
        x - residual / density
    } else {
        x
    }
}

/// `P(Y < 0)` for `Y ~ SN(0, 1, λ)`, i.e. `1/2 - arctan(λ)/π`, written to avoid
/// cancellation for large λ.
pub fn skew_normal_negative_mass(lambda: f64) -> f64 {
    if lambda > 1.0 {
        (1.0 / lambda).atan() / PI
    } else {
        0.5 - lambda.atan() / PI
    }
}

pub use statrs::function::beta::{beta_reg, ln_beta};
pub use statrs::function::gamma::{gamma_lr, ln_gamma};
