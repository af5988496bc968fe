use std::io::Write;

use clap::Args;
use serde::{Deserialize, Serialize};

use super::{emit, json_bytes, parse_families, parse_grid, Failure, Globals, Outcome};
use crate::distributions::{SymmetricBase, UnivariateFamily};
use crate::error::Error;
use crate::generators::CharacteristicGenerator;
use crate::mixability::{
    default_a_grid, jm_verdict_elliptical, jm_verdict_unimodal_location_scale, not_jm_bounded_symmetric,
    not_jm_unbounded_symmetric, skewnormal_noncm_certificate, ssmn_noncm_certificate, MixabilityVerdict, Verdict,
};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct CheckArgs {
    /// Preset reproducing a worked example: 2.1, 2.2, 2.3, 2.4, 3.1 or 3.2.
    #[arg(long)]
    pub example: Option<String>,
    /// Base shape for a scale check: a generator (`normal`, `student_t:3`, ...),
    /// `uniform`, `triangular`, or any family shorthand.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mus: Option<Vec<f64>>,
    /// Marginal law for the symmetric-support bounds, repeatable.
    #[arg(long = "marginal")]
    pub marginals: Vec<String>,
    /// Number of variables (repeats of the marginal list, or skew-normal copies).
    #[arg(long)]
    pub copies: Option<usize>,
    /// Half-width of a common bounded support.
    #[arg(long)]
    pub a: Option<f64>,
    /// Search grid for the unbounded bound: `a..b`, `a:b:step` or a comma list.
    #[arg(long)]
    pub a_grid: Option<String>,
    /// Skewness of a skew-normal law.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Discrete scale law `v@p,...` turning the skew-normal into a skew scale mixture.
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

pub(super) fn run(globals: &Globals, args: &CheckArgs, out: &mut dyn Write) -> Outcome {
    let v = verdict(args)?;
    emit(globals, out, &json_bytes(&v)?)?;
    Ok(match v.verdict {
        Verdict::JM => 0,
        Verdict::NotJM => 1,
        Verdict::Unknown => 2,
    })
}

fn copies_of(f: UnivariateFamily, k: usize) -> Vec<UnivariateFamily> {
    vec![f; k]
}

fn unbounded(families: &[UnivariateFamily], grid: &Option<String>, fallback: Option<Vec<f64>>) -> Result<MixabilityVerdict, Failure> {
    let a_grid = match grid {
        Some(g) => parse_grid(g)?,
        None => fallback.unwrap_or_else(|| default_a_grid(families)),
    };
    Ok(not_jm_unbounded_symmetric(families, &a_grid)?)
}

/// Scale shapes named on the command line without parameters.
fn base_family(name: &str) -> Result<UnivariateFamily, Error> {
    let base = match name {
        "uniform" => SymmetricBase::Uniform,
        "triangular" => SymmetricBase::Triangular,
        other => return other.parse(),
    };
    Ok(UnivariateFamily::LocationScaleSymmetric { base, mu: 0.0, theta: 1.0 })
}

fn verdict(args: &CheckArgs) -> Result<MixabilityVerdict, Failure> {
    if let Some(ex) = &args.example {
        return example(ex, args);
    }
    if let Some(lambda) = args.lambda {
        let n = args.copies.unwrap_or(2);
        return Ok(match &args.h {
            Some(h) => ssmn_noncm_certificate(n, lambda, &h.parse()?)?,
            None => skewnormal_noncm_certificate(n, lambda)?,
        });
    }
    if let Some(sigmas) = &args.sigmas {
        let mus = args.mus.clone().unwrap_or_else(|| vec![0.0; sigmas.len()]);
        let family = args.family.as_deref().unwrap_or("normal");
        if let Ok(g) = family.parse::<CharacteristicGenerator>() {
            return Ok(jm_verdict_elliptical(sigmas, &mus, &g)?);
        }
        let base = base_family(family)?;
        return Ok(jm_verdict_unimodal_location_scale(&base.flags(), sigmas, &mus)?);
    }
    if !args.marginals.is_empty() {
        let families = parse_families(&args.marginals, args.copies.unwrap_or(1))?;
        return match args.a {
            Some(a) => Ok(not_jm_bounded_symmetric(&families, a)?),
            None => unbounded(&families, &args.a_grid, None),
        };
    }
    Err(Failure::malformed("nothing to check: give --example, --lambda, --sigmas or --marginal"))
}

fn example(id: &str, args: &CheckArgs) -> Result<MixabilityVerdict, Failure> {
    use UnivariateFamily as F;
    let a = args.a.unwrap_or(1.0);
    Ok(match id {
        "2.1" => {
            let f = F::BimodalPower { a, r: args.r.unwrap_or(2) };
            not_jm_bounded_symmetric(&copies_of(f, args.copies.unwrap_or(5)), a)?
        }
        "2.2" => {
            let f = F::Symmetrized { inner: Box::new(F::Uniform { lo: 0.9, hi: 1.0 }) };
            let grid = (2..=8).map(|k| 0.25 * k as f64).collect();
            unbounded(&copies_of(f, args.copies.unwrap_or(3)), &args.a_grid, Some(grid))?
        }
        "2.3" => {
            let f = F::BimodalPower { a, r: args.r.unwrap_or(1) };
            not_jm_bounded_symmetric(&copies_of(f, args.copies.unwrap_or(3)), a)?
        }
        "2.4" => {
            let f = F::BimodalMoment { m: args.m.unwrap_or(1) };
            not_jm_bounded_symmetric(&copies_of(f, args.copies.unwrap_or(3)), 1.0)?
        }
        "3.1" => {
            let f = F::GeneralizedLogistic { alpha: args.alpha.unwrap_or(1.0), beta: args.beta.unwrap_or(1.0) };
            f.validate()?;
            let sigmas = args.sigmas.clone().unwrap_or_else(|| vec![1.0; 3]);
            let mus = args.mus.clone().unwrap_or_else(|| vec![0.0; sigmas.len()]);
            jm_verdict_unimodal_location_scale(&f.flags(), &sigmas, &mus)?
        }
        "3.2" => {
            let f = F::KotzType { n: 2.0, m: 1.0, beta: args.beta.unwrap_or(1.0), mu: 0.0, sigma: 1.0 };
            f.validate()?;
            unbounded(&copies_of(f, args.copies.unwrap_or(3)), &args.a_grid, None)?
        }
        other => return Err(Failure::malformed(format!("unknown example '{other}'; expected 2.1-2.4, 3.1 or 3.2"))),
    })
}
