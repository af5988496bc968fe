use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{SymmetricBase, UnivariateFamily};
use crate::error::{domain, Result};
use crate::generators::{pick_index, CharacteristicGenerator};
use crate::rng::seeded;
use crate::scalar::Scalar;

/// Uniform draw on the open interval (0, 1).
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `√W · N(0,1)` for the generator's mixing law.
pub(crate) fn draw_elliptical<R: Rng + ?Sized>(g: &CharacteristicGenerator, rng: &mut R) -> f64 {
    let w = g.draw_mixing(rng);
    w.sqrt() * f64::standard_normal(rng)
}

/// Henze representation `δ|U| + √(1-δ²) V`, `δ = λ/√(1+λ²)`.
pub(crate) fn draw_skew_normal<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    let s = (1.0 + lambda * lambda).sqrt();
    let u = f64::standard_normal(rng);
    let v = f64::standard_normal(rng);
    (lambda / s) * u.abs() + v / s
}

impl UnivariateFamily {
    /// One draw; callers must have validated the parameters.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use UnivariateFamily::*;
        match self {
            LocationScaleSymmetric { base, mu, theta } => {
                let z = match base {
                    SymmetricBase::Generator { generator } => draw_elliptical(generator, rng),
                    SymmetricBase::Uniform => 2.0 * rng.random::<f64>() - 1.0,
                    SymmetricBase::Triangular => rng.random::<f64>() + rng.random::<f64>() - 1.0,
                };
                mu + theta * z
            }
            Uniform { lo, hi } => lo + rng.random::<f64>() * (hi - lo),
            Elliptical1d { mu, sigma, generator } => mu + sigma * draw_elliptical(generator, rng),
            BimodalPower { .. } | BimodalMoment { .. } => {
                self.quantile(open_unit(rng)).expect("probability lies in (0,1)")
            }
            BimodalMomentMixture { terms } => {
                let probs: Vec<f64> = {
                    let total: f64 = terms.iter().map(|t| t.weight).sum();
                    terms.iter().map(|t| t.weight / total).collect()
                };
                let m = terms[pick_index(&probs, rng)].m;
                BimodalMoment { m }.quantile(open_unit(rng)).expect("probability lies in (0,1)")
            }
            GeneralizedLogistic { alpha, beta } => {
                // proposal α|X|^β ~ Gamma(1/β, 1); acceptance (1 + e^{-|x|^β})^{-2α} >= 4^{-α}
                let gamma = Gamma::new(1.0 / beta, 1.0).expect("validated parameters");
                loop {
                    let t = gamma.sample(rng) / alpha;
                    let accept = (-2.0 * alpha * (-t).exp().ln_1p()).exp();
                    if rng.random::<f64>() < accept {
                        return random_sign(rng) * t.powf(1.0 / beta);
                    }
                }
            }
            KotzType { n, m, beta, mu, sigma } => {
                // m|Z|^(2β) ~ Gamma((N - 1/2)/β, 1)
                let gamma = Gamma::new((n - 0.5) / beta, 1.0).expect("validated parameters");
                let t: f64 = gamma.sample(rng);
                mu + sigma * random_sign(rng) * (t / m).powf(1.0 / (2.0 * beta))
            }
            SkewNormal { mu, sigma, lambda } => mu + sigma * draw_skew_normal(*lambda, rng),
            Ssmn { mu, sigma, lambda, h } => {
                let v = h.atoms[pick_index(&h.probs(), rng)].value;
                mu + sigma * v * draw_skew_normal(lambda * v, rng)
            }
            SlashElliptical1d { mu, sigma, generator, q } => {
                let z = sigma * draw_elliptical(generator, rng);
                let u = open_unit(rng);
                mu + z / u.powf(1.0 / q)
            }
            Mixture { components } => {
                let probs: Vec<f64> = components.iter().map(|c| c.weight).collect();
                components[pick_index(&probs, rng)].family.draw(rng)
            }
            Symmetrized { inner } => {
                let x = inner.draw(rng);
                random_sign(rng) * x
            }
        }
    }

    /// `count` i.i.d. draws, deterministic per seed.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return domain("sample count must be positive");
        }
        self.validate()?;
        let mut rng = seeded(seed);
        Ok((0..count).map(|_| self.draw(&mut rng)).collect())
    }
}
