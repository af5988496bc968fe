//! Three-valued mixability verdicts backed by replayable certificates.

use num_rational::BigRational;
use num_traits::Num;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{skew_normal_sf, DiscreteLaw, FamilyFlags, UnivariateFamily};
use crate::error::{domain, Error, Result};
use crate::generators::CharacteristicGenerator;
use crate::oracle::{discretize, ra_minimize_restarts, RaOptions};
use crate::scalar::Scalar;
use crate::special::skew_normal_negative_mass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    JM,
    NotJM,
    Unknown,
}

/// Evaluation of the skew-normal bound for `Y ~ SN(0, 1, |λ|)`: the certificate fires
/// when `F_Y(nE) + (n - 1) P(Y < 0) < 1`, evaluated as `(n - 1) P(Y < 0) < P(Y > nE)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewNormalTerms {
    pub n: usize,
    pub lambda: f64,
    /// `E = |λ|/√(1+λ²) · √(2/π)`.
    pub mean: f64,
    pub cdf_value: f64,
    pub upper_tail: f64,
    pub negative_mass: f64,
    /// `F_Y(nE) + (n - 1) P(Y < 0)`.
    pub bound: f64,
    pub fires: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// `Σθ ≥ 2 max θ`, compared exactly. `iff` marks a unimodal symmetric setting where
    /// failure proves non-mixability.
    ScaleInequality { theta: Vec<f64>, mu: Vec<f64>, sum: f64, max: f64, holds: bool, iff: bool },
    /// `F_i(na/(n+1)) ≤ (n+1)/(2n+1)` for all `2n+1` laws on `[-a, a]`.
    BoundedSymmetricBound {
        families: Vec<UnivariateFamily>,
        a: f64,
        n: usize,
        point: f64,
        cdf_values: Vec<f64>,
        threshold: f64,
        /// `P(|X_i| ≤ na/(n+1))`.
        central_masses: Vec<f64>,
        /// Some central mass exceeds `1/(2n+1)`, the necessary condition for mixability.
        necessary_condition_met: bool,
        fires: bool,
    },
    /// `F_i(a) - F_i(na/(n+1)) ≥ n/(2n+1)` for all `2n+1` laws at some grid point `a`.
    UnboundedSymmetricBound {
        families: Vec<UnivariateFamily>,
        a_grid: Vec<f64>,
        n: usize,
        threshold: f64,
        witness: Option<f64>,
        /// Masses at the witness, empty when nothing fired.
        masses: Vec<f64>,
    },
    SkewNormalBound(SkewNormalTerms),
    /// The skew-normal bound at every atom `λ v_k` of `H`.
    SkewMixtureBound { n: usize, lambda: f64, h: DiscreteLaw, per_atom: Vec<SkewNormalTerms>, fires: bool },
    /// Rearrangement evidence only; never decides a verdict.
    OracleEvidence {
        families: Vec<UnivariateFamily>,
        m: usize,
        options: RaOptions,
        spread: f64,
        stddev: f64,
        variance_trajectory: Vec<f64>,
    },
    HypothesisViolated { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixabilityVerdict {
    pub verdict: Verdict,
    pub joint_center: Option<f64>,
    pub certificate: Certificate,
}

impl MixabilityVerdict {
    fn unknown(certificate: Certificate) -> Self {
        Self { verdict: Verdict::Unknown, joint_center: None, certificate }
    }

    fn hypothesis(reason: impl Into<String>) -> Self {
        Self::unknown(Certificate::HypothesisViolated { reason: reason.into() })
    }

    /// Recomputes the verdict from the inputs stored in the certificate.
    pub fn replay(&self) -> Result<MixabilityVerdict> {
        match &self.certificate {
            Certificate::ScaleInequality { theta, mu, iff, .. } => scale_verdict(theta, mu, *iff),
            Certificate::BoundedSymmetricBound { families, a, .. } => not_jm_bounded_symmetric(families, *a),
            Certificate::UnboundedSymmetricBound { families, a_grid, .. } => not_jm_unbounded_symmetric(families, a_grid),
            Certificate::SkewNormalBound(t) => skewnormal_noncm_certificate(t.n, t.lambda),
            Certificate::SkewMixtureBound { n, lambda, h, .. } => ssmn_noncm_certificate(*n, *lambda, h),
            Certificate::OracleEvidence { families, m, options, .. } => oracle_evidence(families, *m, options),
            Certificate::HypothesisViolated { .. } => Ok(self.clone()),
        }
    }
}

fn check_positive<T: Scalar>(theta: &[T]) -> Result<()> {
    if theta.is_empty() {
        return domain("scale list is empty");
    }
    if theta.iter().any(|t| !(t.is_finite() && *t > T::zero())) {
        return domain("scales must be positive and finite");
    }
    Ok(())
}

/// `Σθ_i ≥ 2 max θ_i` over any exact numeric type (integers, rationals).
pub fn scale_inequality_exact<T: Num + PartialOrd + Clone>(theta: &[T]) -> Result<bool> {
    let Some(first) = theta.first() else {
        return domain("scale list is empty");
    };
    if theta.iter().any(|t| *t <= T::zero()) {
        return domain("scales must be positive");
    }
    let mut max = first.clone();
    let mut sum = T::zero();
    for t in theta {
        if *t > max {
            max = t.clone();
        }
        sum = sum + t.clone();
    }
    Ok(sum >= max.clone() + max)
}

/// `Σθ_i ≥ 2 max θ_i` for floating-point scales, evaluated in exact rational arithmetic
/// on the binary values so that equality is never lost to rounding.
pub fn check_scale_inequality<T: Scalar>(theta: &[T]) -> Result<bool> {
    check_positive(theta)?;
    let exact: Vec<BigRational> = theta
        .iter()
        .map(|t| BigRational::from_float(t.to_f64_lossy()).expect("finite scale"))
        .collect();
    scale_inequality_exact(&exact)
}

fn scale_verdict(theta: &[f64], mu: &[f64], iff: bool) -> Result<MixabilityVerdict> {
    if theta.len() != mu.len() {
        return domain(format!("{} scales for {} locations", theta.len(), mu.len()));
    }
    if mu.iter().any(|m| !m.is_finite()) {
        return domain("locations must be finite");
    }
    let holds = check_scale_inequality(theta)?;
    let certificate = Certificate::ScaleInequality {
        theta: theta.to_vec(),
        mu: mu.to_vec(),
        sum: theta.iter().sum(),
        max: theta.iter().copied().fold(0.0, f64::max),
        holds,
        iff,
    };
    let (verdict, joint_center) = match (holds, iff) {
        (true, _) => (Verdict::JM, Some(mu.iter().sum())),
        (false, true) => (Verdict::NotJM, None),
        (false, false) => (Verdict::Unknown, None),
    };
    Ok(MixabilityVerdict { verdict, joint_center, certificate })
}

/// Marginals `θ_i X + μ_i` of one unimodal symmetric base: JM exactly when the scale
/// inequality holds, with center `Σμ_i`.
pub fn jm_verdict_unimodal_location_scale(flags: &FamilyFlags, theta: &[f64], mu: &[f64]) -> Result<MixabilityVerdict> {
    if !(flags.symmetric && flags.unimodal) {
        return Ok(MixabilityVerdict::hypothesis(format!(
            "base must be unimodal and symmetric (symmetric: {}, unimodal: {})",
            flags.symmetric, flags.unimodal
        )));
    }
    scale_verdict(theta, mu, true)
}

/// Elliptical marginals `E₁(μ_i, σ_i², ψ)`: JM when `Σσ_i ≥ 2 max σ_i`. Failure is
/// decisive only for unimodal generators.
pub fn jm_verdict_elliptical(sigma: &[f64], mu: &[f64], g: &CharacteristicGenerator) -> Result<MixabilityVerdict> {
    g.validate()?;
    scale_verdict(sigma, mu, g.is_unimodal())
}

fn odd_count(families: &[UnivariateFamily]) -> Result<usize> {
    let k = families.len();
    if k < 3 || k.is_multiple_of(2) {
        return domain(format!("need an odd number 2n+1 >= 3 of laws, got {k}"));
    }
    for f in families {
        f.validate()?;
    }
    Ok((k - 1) / 2)
}

fn require_symmetric_about_zero(families: &[UnivariateFamily]) -> Result<()> {
    for f in families {
        if f.center() != Some(0.0) {
            return Err(Error::HypothesisViolated(format!("{f:?} is not symmetric about 0")));
        }
    }
    Ok(())
}

/// Slack a CDF comparison must clear before a symmetric-bound certificate fires. Both
/// bounds need strict inequality; at equality the arcsine law is a CM counterexample.
pub const CERTIFICATE_MARGIN: f64 = 1e-10;

/// Non-mixability of `2n+1` laws symmetric on `[-a, a]` from `F_i(na/(n+1)) < (n+1)/(2n+1)`.
pub fn not_jm_bounded_symmetric(families: &[UnivariateFamily], a: f64) -> Result<MixabilityVerdict> {
    let n = odd_count(families)?;
    if !(a > 0.0 && a.is_finite()) {
        return domain(format!("half-width a = {a} must be positive"));
    }
    require_symmetric_about_zero(families)?;
    for f in families {
        let (lo, hi) = f.support();
        if lo < -a || hi > a {
            return Err(Error::HypothesisViolated(format!("support [{lo}, {hi}] of {f:?} exceeds [-{a}, {a}]")));
        }
    }
    let nf = n as f64;
    let point = nf * a / (nf + 1.0);
    let threshold = (nf + 1.0) / (2.0 * nf + 1.0);
    let cdf_values: Vec<f64> = families.iter().map(|f| f.cdf(point)).collect();
    let central_masses: Vec<f64> = families.iter().map(|f| f.cdf(point) - f.cdf(-point)).collect();
    let fires = cdf_values.iter().all(|&c| c < threshold - CERTIFICATE_MARGIN);
    let necessary_condition_met = central_masses.iter().any(|&m| m > 1.0 / (2.0 * nf + 1.0));
    let certificate = Certificate::BoundedSymmetricBound {
        families: families.to_vec(),
        a,
        n,
        point,
        cdf_values,
        threshold,
        central_masses,
        necessary_condition_met,
        fires,
    };
    let verdict = if fires { Verdict::NotJM } else { Verdict::Unknown };
    Ok(MixabilityVerdict { verdict, joint_center: None, certificate })
}

/// 64 log-spaced points over `[σ_min/10, 10 σ_max]`, with `σ` the families' scale hints.
pub fn default_a_grid(families: &[UnivariateFamily]) -> Vec<f64> {
    let scales: Vec<f64> = families.iter().map(|f| f.scale_hint()).collect();
    let lo = scales.iter().copied().fold(f64::INFINITY, f64::min) / 10.0;
    let hi = scales.iter().copied().fold(0.0, f64::max) * 10.0;
    if !(lo > 0.0 && hi.is_finite()) {
        return Vec::new();
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..64).map(|k| (llo + (lhi - llo) * k as f64 / 63.0).exp()).collect()
}

/// Non-mixability of `2n+1` laws symmetric on ℝ when some grid point `a` satisfies
/// `F_i(a) - F_i(na/(n+1)) > n/(2n+1)` for every `i`.
pub fn not_jm_unbounded_symmetric(families: &[UnivariateFamily], a_grid: &[f64]) -> Result<MixabilityVerdict> {
    let n = odd_count(families)?;
    require_symmetric_about_zero(families)?;
    if a_grid.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return domain("grid points a must be positive");
    }
    let nf = n as f64;
    let threshold = nf / (2.0 * nf + 1.0);
    let masses_at = |a: f64| -> Vec<f64> {
        let inner = nf * a / (nf + 1.0);
        families.iter().map(|f| f.cdf(a) - f.cdf(inner)).collect()
    };
    let hit = a_grid
        .par_iter()
        .map(|&a| {
            let m = masses_at(a);
            m.iter().all(|&x| x > threshold + CERTIFICATE_MARGIN).then_some((a, m))
        })
        .find_first(|r| r.is_some())
        .flatten();
    let (witness, masses) = match hit {
        Some((a, m)) => (Some(a), m),
        None => (None, Vec::new()),
    };
    let verdict = if witness.is_some() { Verdict::NotJM } else { Verdict::Unknown };
    Ok(MixabilityVerdict {
        verdict,
        joint_center: None,
        certificate: Certificate::UnboundedSymmetricBound {
            families: families.to_vec(),
            a_grid: a_grid.to_vec(),
            n,
            threshold,
            witness,
            masses,
        },
    })
}

/// Terms of the skew-normal bound for `n` copies of `SN(μ, σ², λ)`.
pub fn skewnormal_terms(n: usize, lambda: f64) -> Result<SkewNormalTerms> {
    if n < 2 {
        return domain(format!("complete mixability needs n >= 2, got {n}"));
    }
    if !lambda.is_finite() {
        return domain("lambda must be finite");
    }
    let l = lambda.abs();
    let mean = l / (1.0 + l * l).sqrt() * (2.0 / std::f64::consts::PI).sqrt();
    let upper_tail = skew_normal_sf(n as f64 * mean, l);
    let negative_mass = skew_normal_negative_mass(l);
    let cdf_value = 1.0 - upper_tail;
    let extra = (n - 1) as f64 * negative_mass;
    Ok(SkewNormalTerms {
        n,
        lambda,
        mean,
        cdf_value,
        upper_tail,
        negative_mass,
        bound: cdf_value + extra,
        fires: extra < upper_tail,
    })
}

/// Non-CM certificate for `SN(μ, σ², λ)` with `n` copies.
pub fn skewnormal_noncm_certificate(n: usize, lambda: f64) -> Result<MixabilityVerdict> {
    let terms = skewnormal_terms(n, lambda)?;
    let verdict = if terms.fires { Verdict::NotJM } else { Verdict::Unknown };
    Ok(MixabilityVerdict { verdict, joint_center: None, certificate: Certificate::SkewNormalBound(terms) })
}

/// Least `λ ≥ 0` at which the skew-normal certificate fires for `n` copies, located by
/// doubling and then bisection to relative width `1e-10`. `None` if it does not fire
/// below `λ = 1e15`.
pub fn skewnormal_threshold(n: usize) -> Result<Option<f64>> {
    let fires = |l: f64| skewnormal_terms(n, l).map(|t| t.fires);
    if fires(0.0)? {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while !fires(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return Ok(None);
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if fires(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// SSMN non-CM certificate: the skew-normal bound must fire at every atom `λ v_k` of `H`.
pub fn ssmn_noncm_certificate(n: usize, lambda: f64, h: &DiscreteLaw) -> Result<MixabilityVerdict> {
    h.validate()?;
    let per_atom = h
        .atoms
        .iter()
        .map(|atom| skewnormal_terms(n, lambda * atom.value))
        .collect::<Result<Vec<_>>>()?;
    let fires = per_atom.iter().all(|t| t.fires);
    let verdict = if fires { Verdict::NotJM } else { Verdict::Unknown };
    Ok(MixabilityVerdict {
        verdict,
        joint_center: None,
        certificate: Certificate::SkewMixtureBound { n, lambda, h: h.clone(), per_atom, fires },
    })
}

/// Rearrangement evidence on an `m`-point grid, reported without a verdict.
pub fn oracle_evidence(families: &[UnivariateFamily], m: usize, options: &RaOptions) -> Result<MixabilityVerdict> {
    let grid = discretize(families, m)?;
    let best = ra_minimize_restarts(&grid, options)?;
    Ok(MixabilityVerdict::unknown(Certificate::OracleEvidence {
        families: families.to_vec(),
        m,
        options: *options,
        spread: best.row_sum_spread,
        stddev: best.row_sum_stddev,
        variance_trajectory: best.variance_trajectory,
    }))
}
