//! Univariate families: density, CDF, quantile, sampler and structural flags.

mod constants;
mod eval;
mod sampling;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::generators::CharacteristicGenerator;

pub use eval::{elliptical_cdf, elliptical_pdf, skew_normal_cdf, skew_normal_pdf, skew_normal_sf};

/// Standardized symmetric shape for [`UnivariateFamily::LocationScaleSymmetric`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SymmetricBase {
    /// Elliptical with the given generator, unit scale.
    Generator { generator: CharacteristicGenerator },
    /// Uniform on [-1, 1].
    Uniform,
    /// Triangular on [-1, 1] with peak at 0.
    Triangular,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawAtom {
    pub value: f64,
    pub prob: f64,
}

/// Finite discrete law on `(0, ∞)`, used for scale mixing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    pub atoms: Vec<LawAtom>,
}

impl DiscreteLaw {
    pub fn point_mass(value: f64) -> Self {
        Self { atoms: vec![LawAtom { value, prob: 1.0 }] }
    }

    /// Builds a law from `(value, prob)` pairs; probabilities must sum to 1 within 1e-9
    /// and are renormalized exactly.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        let law = Self { atoms: pairs.iter().map(|&(value, prob)| LawAtom { value, prob }).collect() };
        law.validate()?;
        let total: f64 = law.atoms.iter().map(|a| a.prob).sum();
        Ok(Self {
            atoms: law.atoms.iter().map(|a| LawAtom { value: a.value, prob: a.prob / total }).collect(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return domain("discrete law needs at least one atom");
        }
        for a in &self.atoms {
            if !(a.value > 0.0 && a.value.is_finite()) {
                return domain(format!("discrete law atoms must be positive, got {}", a.value));
            }
            if !(a.prob > 0.0 && a.prob <= 1.0) {
                return domain(format!("discrete law probabilities must lie in (0,1], got {}", a.prob));
            }
        }
        let total: f64 = self.atoms.iter().map(|a| a.prob).sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("discrete law probabilities sum to {total}"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.value).collect()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.prob).collect()
    }
}

/// Shorthand `v1@p1,v2@p2`.
impl FromStr for DiscreteLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let pairs = s
            .split(',')
            .map(|atom| {
                let (v, p) = atom
                    .trim()
                    .split_once('@')
                    .ok_or_else(|| Error::Parse(format!("atom '{atom}' is not value@prob")))?;
                let v: f64 = v.parse().map_err(|e| Error::Parse(format!("atom '{atom}': {e}")))?;
                let p: f64 = p.parse().map_err(|e| Error::Parse(format!("atom '{atom}': {e}")))?;
                Ok((v, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTerm {
    pub m: u32,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub family: UnivariateFamily,
}

/// One marginal law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum UnivariateFamily {
    /// `μ + θ·B` for a standardized symmetric base `B`.
    LocationScaleSymmetric { base: SymmetricBase, mu: f64, theta: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `μ + σ·√W·N(0,1)` with `W` the generator's mixing law.
    #[serde(rename = "elliptical_1d")]
    Elliptical1d { mu: f64, sigma: f64, generator: CharacteristicGenerator },
    /// Density `(2r+1)/(2a^(2r+1)) · x^(2r)` on `[-a, a]`.
    BimodalPower { a: f64, r: u32 },
    /// Density `C_m · x^(2m) / √(1-x²)` on `(-1, 1)`.
    BimodalMoment { m: u32 },
    /// Finite mixture `Σ α_m f_m` of [`UnivariateFamily::BimodalMoment`] densities;
    /// weights are renormalized.
    BimodalMomentMixture { terms: Vec<MomentTerm> },
    /// Density `C · exp(-α|x|^β) / (1 + exp(-|x|^β))^(2α)`.
    GeneralizedLogistic { alpha: f64, beta: f64 },
    /// Density generator `C r^(N-1) exp(-m r^β)` at `r = ((x-μ)/σ)²`.
    KotzType {
        n: f64,
        m: f64,
        beta: f64,
        #[serde(default)]
        mu: f64,
        #[serde(default = "unit")]
        sigma: f64,
    },
    /// Density `2/σ · φ(z) Φ(λz)`, `z = (x-μ)/σ`.
    SkewNormal { mu: f64, sigma: f64, lambda: f64 },
    /// Skew scale mixture of normals: given `V = v ~ H`, `SN(μ, σ²v², λv)`.
    Ssmn { mu: f64, sigma: f64, lambda: f64, h: DiscreteLaw },
    /// `Z / U^(1/q) + μ` with `Z ~ E_1(0, σ², ψ)` and independent `U ~ U(0, 1)`.
    #[serde(rename = "slash_elliptical_1d")]
    SlashElliptical1d { mu: f64, sigma: f64, generator: CharacteristicGenerator, q: f64 },
    /// Finite mixture of arbitrary families.
    Mixture { components: Vec<MixtureComponent> },
    /// Law of `εX` with `X` from `family` and an independent random sign `ε`.
    Symmetrized { inner: Box<UnivariateFamily> },
}

fn unit() -> f64 {
    1.0
}

/// Structural facts about a family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFlags {
    pub symmetric: bool,
    pub unimodal: bool,
    pub support: (f64, f64),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be a positive finite number, got {v}"))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be finite, got {v}"))
    }
}

impl UnivariateFamily {
    pub fn standard_normal() -> Self {
        Self::Elliptical1d { mu: 0.0, sigma: 1.0, generator: CharacteristicGenerator::Normal }
    }

    pub fn validate(&self) -> Result<()> {
        use UnivariateFamily::*;
        match self {
            LocationScaleSymmetric { base, mu, theta } => {
                finite("mu", *mu)?;
                positive("theta", *theta)?;
                if let SymmetricBase::Generator { generator } = base {
                    generator.validate()?;
                }
                Ok(())
            }
            Uniform { lo, hi } => {
                finite("lo", *lo)?;
                finite("hi", *hi)?;
                if lo < hi {
                    Ok(())
                } else {
                    domain(format!("uniform needs lo < hi, got [{lo}, {hi}]"))
                }
            }
            Elliptical1d { mu, sigma, generator } => {
                finite("mu", *mu)?;
                positive("sigma", *sigma)?;
                generator.validate()
            }
            BimodalPower { a, r } => {
                positive("a", *a)?;
                if *r >= 1 {
                    Ok(())
                } else {
                    domain("bimodal_power needs a positive integer r")
                }
            }
            BimodalMoment { .. } => Ok(()),
            BimodalMomentMixture { terms } => {
                if terms.is_empty() {
                    return domain("bimodal_moment_mixture needs at least one term");
                }
                for t in terms {
                    positive("mixture weight", t.weight)?;
                }
                Ok(())
            }
            GeneralizedLogistic { alpha, beta } => {
                positive("alpha", *alpha)?;
                positive("beta", *beta)
            }
            KotzType { n, m, beta, mu, sigma } => {
                if !(*n > 1.0 && n.is_finite()) {
                    return domain(format!("kotz_type needs N > 1, got {n}"));
                }
                positive("m", *m)?;
                positive("beta", *beta)?;
                finite("mu", *mu)?;
                positive("sigma", *sigma)
            }
            SkewNormal { mu, sigma, lambda } => {
                finite("mu", *mu)?;
                positive("sigma", *sigma)?;
                finite("lambda", *lambda)
            }
            Ssmn { mu, sigma, lambda, h } => {
                finite("mu", *mu)?;
                positive("sigma", *sigma)?;
                finite("lambda", *lambda)?;
                h.validate()
            }
            SlashElliptical1d { mu, sigma, generator, q } => {
                finite("mu", *mu)?;
                positive("sigma", *sigma)?;
                positive("q", *q)?;
                generator.validate()
            }
            Mixture { components } => {
                if components.is_empty() {
                    return domain("mixture needs at least one component");
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return domain(format!("mixture weights sum to {total}"));
                }
                for c in components {
                    positive("mixture weight", c.weight)?;
                    c.family.validate()?;
                }
                Ok(())
            }
            Symmetrized { inner } => inner.validate(),
        }
    }

    /// Center of symmetry, when the family is symmetric.
    pub fn center(&self) -> Option<f64> {
        use UnivariateFamily::*;
        match self {
            LocationScaleSymmetric { mu, .. } | Elliptical1d { mu, .. } | SlashElliptical1d { mu, .. } => Some(*mu),
            KotzType { mu, .. } => Some(*mu),
            Uniform { lo, hi } => Some(0.5 * (lo + hi)),
            BimodalPower { .. } | BimodalMoment { .. } | BimodalMomentMixture { .. } | GeneralizedLogistic { .. } => {
                Some(0.0)
            }
            SkewNormal { mu, lambda, .. } | Ssmn { mu, lambda, .. } => (*lambda == 0.0).then_some(*mu),
            Mixture { components } => {
                let first = components.first()?.family.center()?;
                components
                    .iter()
                    .all(|c| c.family.center() == Some(first))
                    .then_some(first)
            }
            Symmetrized { .. } => Some(0.0),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        use UnivariateFamily::*;
        match self {
            LocationScaleSymmetric { base: SymmetricBase::Uniform | SymmetricBase::Triangular, mu, theta } => {
                (mu - theta, mu + theta)
            }
            Uniform { lo, hi } => (*lo, *hi),
            BimodalPower { a, .. } => (-a, *a),
            BimodalMoment { .. } | BimodalMomentMixture { .. } => (-1.0, 1.0),
            Mixture { components } => components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
                let (lo, hi) = c.family.support();
                (acc.0.min(lo), acc.1.max(hi))
            }),
            Symmetrized { inner } => {
                let (lo, hi) = inner.support();
                let r = lo.abs().max(hi.abs());
                (-r, r)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn flags(&self) -> FamilyFlags {
        use UnivariateFamily::*;
        let unimodal = match self {
            LocationScaleSymmetric { .. } | Uniform { .. } | Elliptical1d { .. } => true,
            GeneralizedLogistic { .. } | SkewNormal { .. } | SlashElliptical1d { .. } => true,
            BimodalPower { .. } | BimodalMoment { .. } | BimodalMomentMixture { .. } | KotzType { .. } => false,
            Ssmn { h, .. } => h.atoms.len() == 1,
            Mixture { components } => components.len() == 1 && components[0].family.flags().unimodal,
            Symmetrized { inner } => inner.center() == Some(0.0) && inner.flags().unimodal,
        };
        FamilyFlags { symmetric: self.center().is_some(), unimodal, support: self.support() }
    }

    /// Typical spread, used to size search grids and brackets.
    pub fn scale_hint(&self) -> f64 {
        use UnivariateFamily::*;
        match self {
            LocationScaleSymmetric { theta, .. } => *theta,
            Uniform { lo, hi } => 0.5 * (hi - lo),
            Elliptical1d { sigma, .. } | SkewNormal { sigma, .. } | SlashElliptical1d { sigma, .. } => *sigma,
            KotzType { sigma, .. } => *sigma,
            Ssmn { sigma, h, .. } => sigma * h.atoms.iter().map(|a| a.value).fold(0.0, f64::max),
            BimodalPower { a, .. } => *a,
            BimodalMoment { .. } | BimodalMomentMixture { .. } | GeneralizedLogistic { .. } => 1.0,
            Mixture { components } => components
                .iter()
                .map(|c| c.family.scale_hint() + (c.family.center().unwrap_or(0.0)).abs())
                .fold(0.0, f64::max),
            Symmetrized { inner } => inner.scale_hint() + inner.location_hint().abs(),
        }
    }

    /// Location used to start quantile brackets.
    pub(crate) fn location_hint(&self) -> f64 {
        match self {
            UnivariateFamily::SkewNormal { mu, .. } | UnivariateFamily::Ssmn { mu, .. } => *mu,
            other => other.center().unwrap_or(0.0),
        }
    }
}

/// Shorthand used on the command line, e.g. `bimodal_power:1:1`, `uniform:-1:1`,
/// `normal:0:1`, `skew_normal:0:1:5`, or a JSON object.
impl FromStr for UnivariateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let f: Self = serde_json::from_str(s)?;
            f.validate()?;
            return Ok(f);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("family '{s}' is missing parameter {i}")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("family '{s}': {e}")))
        };
        let int = |i: usize| -> Result<u32> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("family '{s}' is missing parameter {i}")))?
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("family '{s}': {e}")))
        };
        let opt = |i: usize, default: f64| -> Result<f64> {
            if parts.len() > i {
                num(i)
            } else {
                Ok(default)
            }
        };
        let generator = |name: &str| -> Result<CharacteristicGenerator> { name.parse() };
        let f = match parts[0] {
            "uniform" => Self::Uniform { lo: num(1)?, hi: num(2)? },
            "normal" | "cauchy" => Self::Elliptical1d { mu: opt(1, 0.0)?, sigma: opt(2, 1.0)?, generator: generator(parts[0])? },
            "student_t" => Self::Elliptical1d {
                mu: opt(2, 0.0)?,
                sigma: opt(3, 1.0)?,
                generator: CharacteristicGenerator::StudentT { nu: num(1)? },
            },
            "triangular" => Self::LocationScaleSymmetric { base: SymmetricBase::Triangular, mu: opt(1, 0.0)?, theta: opt(2, 1.0)? },
            "bimodal_power" => Self::BimodalPower { a: num(1)?, r: int(2)? },
            "bimodal_moment" => Self::BimodalMoment { m: int(1)? },
            "generalized_logistic" => Self::GeneralizedLogistic { alpha: num(1)?, beta: num(2)? },
            "kotz_type" => Self::KotzType { n: num(1)?, m: num(2)?, beta: num(3)?, mu: opt(4, 0.0)?, sigma: opt(5, 1.0)? },
            "skew_normal" => Self::SkewNormal { mu: num(1)?, sigma: num(2)?, lambda: num(3)? },
            other => return Err(Error::Parse(format!("unknown family shorthand '{other}'; use JSON for this family"))),
        };
        f.validate()?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests;
