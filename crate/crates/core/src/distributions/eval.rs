use std::f64::consts::PI;

use super::{constants, SymmetricBase, UnivariateFamily};
use crate::error::{domain, Result};
use crate::generators::CharacteristicGenerator;
use crate::quadrature::{integrate, Tolerance};
use crate::special::{
    beta_reg, gamma_lr, ln_beta, ln_gamma, normal_cdf, normal_pdf, normal_quantile, normal_sf,
    skew_normal_negative_mass,
};

const CDF_TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-12, max_subdivisions: 10_000 };

fn student_t_pdf(z: f64, nu: f64) -> f64 {
    (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * PI).ln()
        - (nu + 1.0) / 2.0 * (z * z / nu).ln_1p())
    .exp()
}

fn student_t_cdf(z: f64, nu: f64) -> f64 {
    let z2 = z * z;
    if z2 < nu {
        // near the center the complementary form keeps full relative accuracy
        let half_mass = 0.5 * beta_reg(0.5, nu / 2.0, z2 / (nu + z2));
        return if z < 0.0 { 0.5 - half_mass } else { 0.5 + half_mass };
    }
    let tail = 0.5 * beta_reg(nu / 2.0, 0.5, nu / (nu + z2));
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Density of the standardized (μ = 0, σ = 1) elliptical law with generator `g`.
pub fn elliptical_pdf(g: &CharacteristicGenerator, z: f64) -> f64 {
    match *g {
        CharacteristicGenerator::Normal => normal_pdf(z),
        CharacteristicGenerator::Cauchy => 1.0 / (PI * (1.0 + z * z)),
        CharacteristicGenerator::StudentT { nu } => student_t_pdf(z, nu),
        CharacteristicGenerator::PearsonVii { n, m } => {
            let nu = 2.0 * n - 1.0;
            let c = (m / nu).sqrt();
            student_t_pdf(z / c, nu) / c
        }
        CharacteristicGenerator::DiscreteMixture { ref atoms } => {
            atoms.iter().map(|a| a.weight * normal_pdf(z / a.scale) / a.scale).sum()
        }
    }
}

pub fn elliptical_cdf(g: &CharacteristicGenerator, z: f64) -> f64 {
    match *g {
        CharacteristicGenerator::Normal => normal_cdf(z),
        CharacteristicGenerator::Cauchy => 0.5 + z.atan() / PI,
        CharacteristicGenerator::StudentT { nu } => student_t_cdf(z, nu),
        CharacteristicGenerator::PearsonVii { n, m } => {
            let nu = 2.0 * n - 1.0;
            student_t_cdf(z / (m / nu).sqrt(), nu)
        }
        CharacteristicGenerator::DiscreteMixture { ref atoms } => {
            atoms.iter().map(|a| a.weight * normal_cdf(z / a.scale)).sum()
        }
    }
}

fn elliptical_quantile(g: &CharacteristicGenerator, p: f64) -> f64 {
    match g {
        CharacteristicGenerator::Normal => normal_quantile(p),
        CharacteristicGenerator::Cauchy => (PI * (p - 0.5)).tan(),
        _ => invert(|z| elliptical_cdf(g, z), p, (f64::NEG_INFINITY, f64::INFINITY), 0.0, 1.0),
    }
}

pub fn skew_normal_pdf(z: f64, lambda: f64) -> f64 {
    2.0 * normal_pdf(z) * normal_cdf(lambda * z)
}

/// `P(Z <= z)` for `Z ~ SN(0, 1, λ)` by quadrature of the density.
pub fn skew_normal_cdf(z: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return normal_cdf(z);
    }
    if z <= 0.0 {
        integrate(|x| skew_normal_pdf(x, lambda), f64::NEG_INFINITY, z, CDF_TOL).value
    } else {
        1.0 - skew_normal_sf(z, lambda)
    }
}

/// `P(Z > z)` for `Z ~ SN(0, 1, λ)`, accurate in the upper tail.
pub fn skew_normal_sf(z: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return normal_sf(z);
    }
    if z >= 0.0 {
        integrate(|x| skew_normal_pdf(x, lambda), z, f64::INFINITY, CDF_TOL).value
    } else {
        let below_zero = skew_normal_negative_mass(lambda);
        let between = integrate(|x| skew_normal_pdf(x, lambda), z, 0.0, CDF_TOL).value;
        1.0 - below_zero + between
    }
}

/// `F(z) = ∫₀¹ G(z u^{1/q}) du`; for `|z| > 1` the substitution `t = |z| u^{1/q}` gives the
/// tail `q |z|^{-q} ∫₀^{|z|} t^{q-1} G(-t) dt`, which resolves the mass near `u = 0`.
fn slash_cdf(g: &CharacteristicGenerator, q: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.5;
    }
    if z.is_infinite() {
        return if z < 0.0 { 0.0 } else { 1.0 };
    }
    let a = z.abs();
    let lower_tail = if a <= 1.0 {
        integrate(|u| elliptical_cdf(g, -a * u.powf(1.0 / q)), 0.0, 1.0, CDF_TOL).value
    } else {
        let inner = integrate(|t| t.powf(q - 1.0) * elliptical_cdf(g, -t), 0.0, a, CDF_TOL).value;
        q * inner / a.powf(q)
    };
    if z < 0.0 {
        lower_tail
    } else {
        1.0 - lower_tail
    }
}

/// `f(z) = q ∫₀¹ s^q g(zs) ds`, rescaled to `q |z|^{-q-1} ∫₀^{|z|} t^q g(t) dt` for `|z| > 1`.
fn slash_pdf(g: &CharacteristicGenerator, q: f64, z: f64) -> f64 {
    let a = z.abs();
    if a.is_infinite() {
        return 0.0;
    }
    if a <= 1.0 {
        q * integrate(|s| s.powf(q) * elliptical_pdf(g, a * s), 0.0, 1.0, CDF_TOL).value
    } else {
        let inner = integrate(|t| t.powf(q) * elliptical_pdf(g, t), 0.0, a, CDF_TOL).value;
        q * inner / a.powf(q + 1.0)
    }
}

fn base_pdf(base: &SymmetricBase, z: f64) -> f64 {
    match base {
        SymmetricBase::Generator { generator } => elliptical_pdf(generator, z),
        SymmetricBase::Uniform => {
            if z.abs() <= 1.0 {
                0.5
            } else {
                0.0
            }
        }
        SymmetricBase::Triangular => (1.0 - z.abs()).max(0.0),
    }
}

fn base_cdf(base: &SymmetricBase, z: f64) -> f64 {
    match base {
        SymmetricBase::Generator { generator } => elliptical_cdf(generator, z),
        SymmetricBase::Uniform => (0.5 * (z + 1.0)).clamp(0.0, 1.0),
        SymmetricBase::Triangular => {
            if z <= -1.0 {
                0.0
            } else if z <= 0.0 {
                0.5 * (1.0 + z).powi(2)
            } else if z < 1.0 {
                1.0 - 0.5 * (1.0 - z).powi(2)
            } else {
                1.0
            }
        }
    }
}

fn moment_constant(m: u32) -> f64 {
    (-ln_beta(m as f64 + 0.5, 0.5)).exp()
}

fn moment_pdf(m: u32, x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    moment_constant(m) * x.powi(2 * m as i32) / (1.0 - x * x).sqrt()
}

/// `X²` follows Beta(m + 1/2, 1/2), so `F(x) = 1/2 + sign(x)/2 · I_{x²}(m + 1/2, 1/2)`.
fn moment_cdf(m: u32, x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let half_mass = 0.5 * beta_reg(m as f64 + 0.5, 0.5, x * x);
    if x < 0.0 {
        0.5 - half_mass
    } else {
        0.5 + half_mass
    }
}

fn kotz_cdf(n: f64, m: f64, beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.5;
    }
    if z.is_infinite() {
        return if z < 0.0 { 0.0 } else { 1.0 };
    }
    // m |Z|^(2β) ~ Gamma((N - 1/2)/β, 1)
    let half_mass = 0.5 * gamma_lr((n - 0.5) / beta, m * z.abs().powf(2.0 * beta));
    if z < 0.0 {
        0.5 - half_mass
    } else {
        0.5 + half_mass
    }
}

/// Bisection inverse of a nondecreasing `cdf`, expanding the bracket on unbounded sides.
pub(crate) fn invert(cdf: impl Fn(f64) -> f64, p: f64, support: (f64, f64), start: f64, scale: f64) -> f64 {
    let (mut lo, mut hi) = support;
    let scale = if scale > 0.0 { scale } else { 1.0 };
    if !lo.is_finite() {
        let mut step = scale;
        lo = start.min(hi) - step;
        while cdf(lo) > p {
            step *= 2.0;
            lo = start.min(hi) - step;
        }
    }
    if !hi.is_finite() {
        let mut step = scale;
        hi = start.max(lo) + step;
        while cdf(hi) < p {
            step *= 2.0;
            hi = start.max(lo) + step;
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(scale) || mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl UnivariateFamily {
    /// Density at `x`; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        use UnivariateFamily::*;
        match self {
            LocationScaleSymmetric { base, mu, theta } => base_pdf(base, (x - mu) / theta) / theta,
            Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Elliptical1d { mu, sigma, generator } => elliptical_pdf(generator, (x - mu) / sigma) / sigma,
            BimodalPower { a, r } => {
                if x.abs() > *a {
                    0.0
                } else {
                    let k = 2 * *r as i32 + 1;
                    k as f64 / (2.0 * a.powi(k)) * x.powi(2 * *r as i32)
                }
            }
            BimodalMoment { m } => moment_pdf(*m, x),
            BimodalMomentMixture { terms } => {
                let total: f64 = terms.iter().map(|t| t.weight).sum();
                terms.iter().map(|t| t.weight * moment_pdf(t.m, x)).sum::<f64>() / total
            }
            GeneralizedLogistic { alpha, beta } => {
                constants::generalized_logistic(*alpha, *beta) * constants::generalized_logistic_kernel(*alpha, *beta, x)
            }
            KotzType { n, m, beta, mu, sigma } => {
                let z = (x - mu) / sigma;
                constants::kotz(*n, *m, *beta) * constants::kotz_kernel(*n, *m, *beta, z) / sigma
            }
            SkewNormal { mu, sigma, lambda } => skew_normal_pdf((x - mu) / sigma, *lambda) / sigma,
            Ssmn { mu, sigma, lambda, h } => {
                let z = (x - mu) / sigma;
                2.0 * normal_cdf(lambda * z)
                    * h.atoms.iter().map(|a| a.prob * normal_pdf(z / a.value) / a.value).sum::<f64>()
                    / sigma
            }
            SlashElliptical1d { mu, sigma, generator, q } => slash_pdf(generator, *q, (x - mu) / sigma) / sigma,
            Mixture { components } => components.iter().map(|c| c.weight * c.family.density(x)).sum(),
            Symmetrized { inner } => 0.5 * (inner.density(x) + inner.density(-x)),
        }
    }

    /// Distribution function at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        use UnivariateFamily::*;
        let value = match self {
            LocationScaleSymmetric { base, mu, theta } => base_cdf(base, (x - mu) / theta),
            Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Elliptical1d { mu, sigma, generator } => elliptical_cdf(generator, (x - mu) / sigma),
            BimodalPower { a, r } => {
                if x < -a {
                    0.0
                } else if x >= *a {
                    1.0
                } else {
                    let k = 2 * *r as i32 + 1;
                    (x.powi(k) + a.powi(k)) / (2.0 * a.powi(k))
                }
            }
            BimodalMoment { m } => moment_cdf(*m, x),
            BimodalMomentMixture { terms } => {
                let total: f64 = terms.iter().map(|t| t.weight).sum();
                terms.iter().map(|t| t.weight * moment_cdf(t.m, x)).sum::<f64>() / total
            }
            GeneralizedLogistic { alpha, beta } => {
                if x == 0.0 {
                    0.5
                } else {
                    let c = constants::generalized_logistic(*alpha, *beta);
                    let half = c * integrate(
                        |t| constants::generalized_logistic_kernel(*alpha, *beta, t),
                        0.0,
                        x.abs(),
                        CDF_TOL,
                    )
                    .value;
                    if x < 0.0 {
                        0.5 - half
                    } else {
                        0.5 + half
                    }
                }
            }
            KotzType { n, m, beta, mu, sigma } => kotz_cdf(*n, *m, *beta, (x - mu) / sigma),
            SkewNormal { mu, sigma, lambda } => skew_normal_cdf((x - mu) / sigma, *lambda),
            Ssmn { mu, sigma, lambda, h } => h
                .atoms
                .iter()
                .map(|a| a.prob * skew_normal_cdf((x - mu) / (sigma * a.value), lambda * a.value))
                .sum(),
            SlashElliptical1d { mu, sigma, generator, q } => slash_cdf(generator, *q, (x - mu) / sigma),
            Mixture { components } => components.iter().map(|c| c.weight * c.family.cdf(x)).sum(),
            Symmetrized { inner } => 0.5 * (inner.cdf(x) + 1.0 - inner.cdf(-x)),
        };
        value.clamp(0.0, 1.0)
    }

    /// Inverse distribution function for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile probability must lie in (0,1), got {p}"));
        }
        use UnivariateFamily::*;
        Ok(match self {
            Uniform { lo, hi } => lo + p * (hi - lo),
            LocationScaleSymmetric { base, mu, theta } => {
                let z = match base {
                    SymmetricBase::Uniform => 2.0 * p - 1.0,
                    SymmetricBase::Triangular => {
                        if p < 0.5 {
                            -1.0 + (2.0 * p).sqrt()
                        } else {
                            1.0 - (2.0 * (1.0 - p)).sqrt()
                        }
                    }
                    SymmetricBase::Generator { generator } => elliptical_quantile(generator, p),
                };
                mu + theta * z
            }
            Elliptical1d { mu, sigma, generator } => mu + sigma * elliptical_quantile(generator, p),
            BimodalPower { a, r } => {
                let k = 2 * *r as i32 + 1;
                let y = 2.0 * p - 1.0;
                a * y.signum() * y.abs().powf(1.0 / k as f64)
            }
            SkewNormal { mu, sigma, lambda } if *lambda == 0.0 => mu + sigma * normal_quantile(p),
            _ => {
                self.validate()?;
                invert(|x| self.cdf(x), p, self.support(), self.location_hint(), self.scale_hint())
            }
        })
    }
}
