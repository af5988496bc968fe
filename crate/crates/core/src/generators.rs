//! Characteristic generators of elliptical laws, held in normal variance-mixture form.
//!
//! A one-dimensional elliptical variable with generator ψ is represented as
//! `√W · N(0, 1)` for an independent nonnegative mixing variable `W`, so that
//! `ψ(u) = E[exp(-u W / 2)]`. Every generator here therefore belongs to the
//! class that is valid in all dimensions.

use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::rng::seeded;
use crate::special::ln_gamma;

/// One component of a discrete scale mixture of normals: scale `s` with probability `weight`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleAtom {
    pub weight: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharacteristicGenerator {
    Normal,
    StudentT {
        nu: f64,
    },
    Cauchy,
    /// Density proportional to `(1 + x²/m)^(-n)`, `n > 1/2`, `m > 0`.
    #[serde(rename = "pearson_vii")]
    PearsonVii {
        n: f64,
        m: f64,
    },
    DiscreteMixture {
        atoms: Vec<ScaleAtom>,
    },
}

/// Largest dimension in which a generator defines a valid characteristic function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxDimension {
    Finite(usize),
    Infinite,
}

/// Law of the mixing variable `W` in `X = √W · Z`.
#[derive(Clone, Debug, PartialEq)]
pub enum MixingLaw {
    /// `W ≡ 1`.
    Degenerate,
    /// Density `β^α / Γ(α) · w^(-α-1) · exp(-β / w)`.
    InverseGamma { shape: f64, scale: f64 },
    /// `W = s_k²` with probability `w_k`.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl CharacteristicGenerator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Normal | Self::Cauchy => Ok(()),
            Self::StudentT { nu } => {
                if nu.is_finite() && *nu > 0.0 {
                    Ok(())
                } else {
                    domain(format!("student_t requires nu > 0, got {nu}"))
                }
            }
            Self::PearsonVii { n, m } => {
                if n.is_finite() && *n > 0.5 && m.is_finite() && *m > 0.0 {
                    Ok(())
                } else {
                    domain(format!("pearson_vii requires n > 1/2 and m > 0, got n={n}, m={m}"))
                }
            }
            Self::DiscreteMixture { atoms } => {
                if atoms.is_empty() {
                    return domain("discrete_mixture needs at least one atom");
                }
                for a in atoms {
                    if !(a.weight > 0.0 && a.weight <= 1.0) || !(a.scale > 0.0 && a.scale.is_finite()) {
                        return domain(format!(
                            "discrete_mixture atom needs weight in (0,1] and scale > 0, got {a:?}"
                        ));
                    }
                }
                let total: f64 = atoms.iter().map(|a| a.weight).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return domain(format!("discrete_mixture weights sum to {total}, not 1"));
                }
                Ok(())
            }
        }
    }

    pub fn max_dimension(&self) -> MaxDimension {
        MaxDimension::Infinite
    }

    /// Normal variance mixtures have unimodal symmetric one-dimensional densities.
    pub fn is_unimodal(&self) -> bool {
        true
    }

    pub fn mixing_law(&self) -> MixingLaw {
        match *self {
            Self::Normal => MixingLaw::Degenerate,
            Self::StudentT { nu } => MixingLaw::InverseGamma { shape: nu / 2.0, scale: nu / 2.0 },
            Self::Cauchy => MixingLaw::InverseGamma { shape: 0.5, scale: 0.5 },
            Self::PearsonVii { n, m } => MixingLaw::InverseGamma { shape: n - 0.5, scale: m / 2.0 },
            Self::DiscreteMixture { ref atoms } => MixingLaw::Discrete {
                values: atoms.iter().map(|a| a.scale * a.scale).collect(),
                probs: atoms.iter().map(|a| a.weight).collect(),
            },
        }
    }

    /// `ψ(u)`. Student-t and Pearson VII go through quadrature over the mixing density.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return domain(format!("characteristic generator argument must be >= 0, got {u}"));
        }
        self.validate()?;
        if u == 0.0 {
            return Ok(1.0);
        }
        Ok(match self {
            Self::Normal => (-u / 2.0).exp(),
            Self::Cauchy => (-u.sqrt()).exp(),
            Self::DiscreteMixture { atoms } => atoms
                .iter()
                .map(|a| a.weight * (-u * a.scale * a.scale / 2.0).exp())
                .sum(),
            Self::StudentT { .. } | Self::PearsonVii { .. } => {
                let MixingLaw::InverseGamma { shape, scale } = self.mixing_law() else {
                    unreachable!()
                };
                inverse_gamma_laplace(shape, scale, u / 2.0)
            }
        })
    }

    /// One draw of the mixing variable `W`.
    pub fn draw_mixing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.mixing_law().draw(rng)
    }

    /// `count` independent draws of `W`, deterministic for a fixed seed.
    pub fn sample_mixing(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return domain("sample count must be positive");
        }
        self.validate()?;
        let law = self.mixing_law();
        let mut rng = seeded(seed);
        Ok((0..count).map(|_| law.draw(&mut rng)).collect())
    }
}

impl MixingLaw {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MixingLaw::Degenerate => 1.0,
            MixingLaw::InverseGamma { shape, scale } => {
                let g = Gamma::new(*shape, 1.0 / *scale).expect("validated parameters");
                1.0 / g.sample(rng)
            }
            MixingLaw::Discrete { values, probs } => values[pick_index(probs, rng)],
        }
    }
}

/// Index `k` with probability `probs[k]` (probabilities assumed to sum to 1).
pub(crate) fn pick_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

/// `E[exp(-t W)]` for `W ~ InvGamma(shape, scale)`, integrated over `s = ln w`.
fn inverse_gamma_laplace(shape: f64, scale: f64, t: f64) -> f64 {
    let log_norm = shape * scale.ln() - ln_gamma(shape);
    let integrand = |s: f64| {
        let w = s.exp();
        (log_norm - shape * s - scale / w - t * w).exp()
    };
    integrate(integrand, f64::NEG_INFINITY, f64::INFINITY, Tolerance::absolute(1e-10)).value
}

/// Shorthand used on the command line: `normal`, `cauchy`, `student_t:3`,
/// `pearson_vii:N:m`, `discrete_mixture:w1@s1,w2@s2`, or a JSON object.
impl FromStr for CharacteristicGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let g: Self = serde_json::from_str(s)?;
            g.validate()?;
            return Ok(g);
        }
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> {
            rest.get(i)
                .ok_or_else(|| Error::Parse(format!("generator '{s}' is missing parameter {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("generator '{s}': {e}")))
        };
        let g = match kind {
            "normal" => Self::Normal,
            "cauchy" => Self::Cauchy,
            "student_t" | "t" => Self::StudentT { nu: num(0)? },
            "pearson_vii" => Self::PearsonVii { n: num(0)?, m: num(1)? },
            "discrete_mixture" | "mixture" => {
                let spec = rest.first().ok_or_else(|| Error::Parse(format!("generator '{s}' has no atoms")))?;
                let atoms = spec
                    .split(',')
                    .map(|atom| {
                        let (w, sc) = atom
                            .split_once('@')
                            .ok_or_else(|| Error::Parse(format!("atom '{atom}' is not weight@scale")))?;
                        let weight = w.parse().map_err(|e| Error::Parse(format!("atom '{atom}': {e}")))?;
                        let scale = sc.parse().map_err(|e| Error::Parse(format!("atom '{atom}': {e}")))?;
                        Ok(ScaleAtom { weight, scale })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::DiscreteMixture { atoms }
            }
            other => return Err(Error::Parse(format!("unknown generator kind '{other}'"))),
        };
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<CharacteristicGenerator> {
        vec![
            CharacteristicGenerator::Normal,
            CharacteristicGenerator::StudentT { nu: 4.0 },
            CharacteristicGenerator::StudentT { nu: 1.5 },
            CharacteristicGenerator::Cauchy,
            CharacteristicGenerator::PearsonVii { n: 2.0, m: 3.0 },
            CharacteristicGenerator::DiscreteMixture {
                atoms: vec![ScaleAtom { weight: 0.5, scale: 1.0 }, ScaleAtom { weight: 0.5, scale: 2.0 }],
            },
        ]
    }

    #[test]
    fn normal_values() {
        let g = CharacteristicGenerator::Normal;
        assert_eq!(g.eval(0.0).unwrap(), 1.0);
        assert!((g.eval(2.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn discrete_mixture_value() {
        let g = &all_kinds()[5];
        let want = 0.5 * (-0.5f64).exp() + 0.5 * (-2.0f64).exp();
        assert!((g.eval(1.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.3709).abs() < 1e-4);
    }

    #[test]
    fn student_t_one_matches_cauchy_closed_form() {
        let t1 = CharacteristicGenerator::StudentT { nu: 1.0 };
        for &u in &[0.1, 0.5, 1.0, 4.0, 25.0] {
            let q = t1.eval(u).unwrap();
            let c = CharacteristicGenerator::Cauchy.eval(u).unwrap();
            assert!((q - c).abs() < 1e-9, "u={u}: {q} vs {c}");
        }
    }

    #[test]
    fn pearson_vii_is_a_rescaled_t() {
        // N = (nu+1)/2, m = nu gives t_nu
        let nu = 5.0;
        let p = CharacteristicGenerator::PearsonVii { n: (nu + 1.0) / 2.0, m: nu };
        let t = CharacteristicGenerator::StudentT { nu };
        for &u in &[0.3, 2.0, 10.0] {
            assert!((p.eval(u).unwrap() - t.eval(u).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_argument_is_rejected() {
        assert!(matches!(CharacteristicGenerator::Normal.eval(-1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_parameters() {
        assert!(CharacteristicGenerator::StudentT { nu: 0.0 }.validate().is_err());
        assert!(CharacteristicGenerator::PearsonVii { n: 0.5, m: 1.0 }.validate().is_err());
        let bad = CharacteristicGenerator::DiscreteMixture {
            atoms: vec![ScaleAtom { weight: 0.5, scale: 1.0 }, ScaleAtom { weight: 0.4, scale: 2.0 }],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn mixing_samples() {
        assert_eq!(CharacteristicGenerator::Normal.sample_mixing(3, 11).unwrap(), vec![1.0; 3]);
        let single = CharacteristicGenerator::DiscreteMixture { atoms: vec![ScaleAtom { weight: 1.0, scale: 3.0 }] };
        assert_eq!(single.sample_mixing(2, 1).unwrap(), vec![9.0, 9.0]);
        assert!(CharacteristicGenerator::Normal.sample_mixing(0, 1).is_err());

        let w = CharacteristicGenerator::StudentT { nu: 4.0 }.sample_mixing(1_000_000, 7).unwrap();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = CharacteristicGenerator::PearsonVii { n: 2.0, m: 1.0 };
        assert_eq!(g.sample_mixing(100, 5).unwrap(), g.sample_mixing(100, 5).unwrap());
        assert_ne!(g.sample_mixing(100, 5).unwrap(), g.sample_mixing(100, 6).unwrap());
    }

    #[test]
    fn generator_matches_monte_carlo_laplace_transform() {
        for (i, g) in all_kinds().iter().enumerate() {
            let w = g.sample_mixing(1_000_000, 100 + i as u64).unwrap();
            for &u in &[0.0, 0.5, 1.0, 5.0, 25.0] {
                let vals: Vec<f64> = w.iter().map(|&x| (-u * x / 2.0).exp()).collect();
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                let se = (var / n).sqrt();
                let exact = g.eval(u).unwrap();
                assert!(
                    (exact - mean).abs() <= 3.0 * se + 1e-9,
                    "{g:?} u={u}: psi={exact}, mc={mean}, se={se}"
                );
            }
        }
    }

    #[test]
    fn generator_is_a_nonincreasing_probability() {
        for g in all_kinds() {
            let mut prev = 1.0;
            for k in 0..=60 {
                let u = 0.5 * k as f64;
                let v = g.eval(u).unwrap();
                assert!(v > 0.0 && v <= 1.0, "{g:?} at {u}: {v}");
                assert!(v <= prev + 1e-12, "{g:?} increases at {u}");
                prev = v;
            }
        }
    }

    #[test]
    fn shorthand_parsing() {
        assert_eq!("student_t:3".parse::<CharacteristicGenerator>().unwrap(), CharacteristicGenerator::StudentT { nu: 3.0 });
        assert_eq!(
            "discrete_mixture:0.25@1,0.75@2".parse::<CharacteristicGenerator>().unwrap(),
            CharacteristicGenerator::DiscreteMixture {
                atoms: vec![ScaleAtom { weight: 0.25, scale: 1.0 }, ScaleAtom { weight: 0.75, scale: 2.0 }]
            }
        );
        let json: CharacteristicGenerator = r#"{"kind":"pearson_vii","n":2.5,"m":1}"#.parse().unwrap();
        assert_eq!(json, CharacteristicGenerator::PearsonVii { n: 2.5, m: 1.0 });
        assert!("stable:1.5".parse::<CharacteristicGenerator>().is_err());
    }
}
