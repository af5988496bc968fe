use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::batch::{Approximation, CouplingKind, MatrixBatch, SampleBatch};
use super::equicorrelation::EquicorrelationPlan;
use super::linalg::psd_factor;
use super::polygon::PolygonCoupling;
use crate::distributions::{DiscreteLaw, SymmetricBase, UnivariateFamily};
use crate::error::{domain, Error, Result};
use crate::generators::{pick_index, CharacteristicGenerator};
use crate::oracle::{discretize, ra_minimize_restarts, RaOptions};
use crate::rng::{chunk_rng, chunks, SeededRng};
use crate::scalar::Scalar;
use nalgebra::DMatrix;

/// Scalars drawn once per joint sample and shared by every component.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "shared", rename_all = "snake_case")]
pub enum SharedScalar {
    /// `W` of the generator's normal-mixture representation.
    Mixing,
    /// `U^{-1/q}` of the slash construction.
    Slash { q: f64 },
    /// `θ ~ H` of a scale mixture.
    Scale { h: DiscreteLaw },
}

/// Base coupling plus the scalars shared across components.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharedMixingPlan {
    pub base: CouplingKind,
    pub shared: Vec<SharedScalar>,
}

/// `K = f(C)`, the constant that `f(X₁ + ⋯ + X_n)` takes under a mixing coupling.
pub fn transform_center(f: impl Fn(f64) -> f64, c: f64) -> f64 {
    f(c)
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return domain("sample count must be positive");
    }
    Ok(())
}

/// Fills `count` rows of width `n` chunk by chunk; chunk `k` draws from seed `seed + k`.
fn fill_rows<T: Scalar>(
    count: usize,
    n: usize,
    seed: u64,
    row: impl Fn(&mut SeededRng, &mut [T]) + Sync,
) -> Vec<T> {
    let pieces: Vec<(usize, usize)> = chunks(count).collect();
    pieces
        .into_par_iter()
        .map(|(k, len)| {
            let mut rng = chunk_rng(seed, k);
            let mut out = vec![T::zero(); len * n];
            for r in out.chunks_exact_mut(n) {
                row(&mut rng, r);
            }
            out
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Replaces the last coordinate by `center - (x₁ + ⋯ + x_{n-1})`, the value the
/// construction gives it in exact arithmetic, so the stored row sums to `center`
/// without accumulated rounding.
fn close_row<T: Scalar>(row: &mut [T], center: T) {
    let (last, head) = row.split_last_mut().expect("nonempty row");
    let mut partial = T::zero();
    for &x in head.iter() {
        partial += x;
    }
    *last = center - partial;
}

fn check_locations<T: Scalar>(mu: &[T], sigma: &[T]) -> Result<T> {
    if mu.len() != sigma.len() {
        return domain(format!("{} locations for {} scales", mu.len(), sigma.len()));
    }
    if mu.iter().any(|m| !m.is_finite()) {
        return domain("locations must be finite");
    }
    let mut c = T::zero();
    for &m in mu {
        c += m;
    }
    Ok(c)
}

/// Joint draws `X = μ + √W · L z` with marginals `E₁(μ_i, σ_i², ψ)` and `Σ X_i = Σ μ_i`.
pub fn sample_jm_elliptical<T: Scalar>(
    mu: &[T],
    sigma: &[T],
    g: &CharacteristicGenerator,
    count: usize,
    seed: u64,
) -> Result<SampleBatch<T>> {
    g.validate()?;
    check_count(count)?;
    let center = check_locations(mu, sigma)?;
    let rows = PolygonCoupling::new(sigma)?.factor_rows();
    let data = fill_rows(count, mu.len(), seed, |rng, out| {
        let scale = T::from_f64_lossy(g.draw_mixing(rng).sqrt());
        let (z0, z1) = (T::standard_normal(rng), T::standard_normal(rng));
        for ((x, &m), l) in out.iter_mut().zip(mu).zip(&rows) {
            *x = m + scale * (l[0] * z0 + l[1] * z1);
        }
        close_row(out, center);
    });
    Ok(SampleBatch {
        n_vars: mu.len(),
        data,
        seed,
        joint_center: Some(center),
        kind: CouplingKind::Elliptical,
        generator: Some(g.clone()),
        approximation: None,
    })
}

/// Slash couplings: the elliptical coupling divided by one shared `U^{1/q}` per draw.
pub fn sample_jm_slash<T: Scalar>(
    mu: &[T],
    sigma: &[T],
    g: &CharacteristicGenerator,
    q: f64,
    count: usize,
    seed: u64,
) -> Result<SampleBatch<T>> {
    if !(q > 0.0 && q.is_finite()) {
        return domain(format!("slash exponent q = {q} must be positive"));
    }
    g.validate()?;
    check_count(count)?;
    let center = check_locations(mu, sigma)?;
    let rows = PolygonCoupling::new(sigma)?.factor_rows();
    let data = fill_rows(count, mu.len(), seed, |rng, out| {
        let w = g.draw_mixing(rng);
        let (z0, z1) = (T::standard_normal(rng), T::standard_normal(rng));
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        let scale = T::from_f64_lossy(w.sqrt() / u.powf(1.0 / q));
        for ((x, &m), l) in out.iter_mut().zip(mu).zip(&rows) {
            *x = m + scale * (l[0] * z0 + l[1] * z1);
        }
        close_row(out, center);
    });
    Ok(SampleBatch {
        n_vars: mu.len(),
        data,
        seed,
        joint_center: Some(center),
        kind: CouplingKind::Slash,
        generator: Some(g.clone()),
        approximation: None,
    })
}

/// `(μ, s, ψ)` when the base is an elliptical law with a supported generator.
fn elliptical_parts(base: &UnivariateFamily) -> Option<(f64, f64, CharacteristicGenerator)> {
    match base {
        UnivariateFamily::Elliptical1d { mu, sigma, generator } => Some((*mu, *sigma, generator.clone())),
        UnivariateFamily::LocationScaleSymmetric { base: SymmetricBase::Generator { generator }, mu, theta } => {
            Some((*mu, *theta, generator.clone()))
        }
        _ => None,
    }
}

/// `n` copies of `base` scaled by one shared `θ ~ H`, summing to `n μ`.
///
/// Elliptical bases use the exact regular-polygon coupling. Other unimodal symmetric
/// bases use the rearrangement table of an `m`-point grid (`grid_m`), whose residual
/// spread is recorded in the batch.
pub fn sample_cm_scale_mixture<T: Scalar>(
    base: &UnivariateFamily,
    h: &DiscreteLaw,
    n: usize,
    count: usize,
    seed: u64,
    grid_m: usize,
) -> Result<SampleBatch<T>> {
    base.validate()?;
    h.validate()?;
    check_count(count)?;
    if n < 2 {
        return domain(format!("complete mixability needs n >= 2, got {n}"));
    }
    let flags = base.flags();
    if !(flags.symmetric && flags.unimodal) {
        return Err(Error::HypothesisViolated(format!("base {base:?} is not unimodal and symmetric")));
    }
    let mu = base.center().expect("symmetric families have a center");
    let center = T::from_f64_lossy(n as f64 * mu);
    let probs = h.probs();
    let values = h.values();
    if let Some((mu, s, g)) = elliptical_parts(base) {
        let rows = PolygonCoupling::new(&vec![T::one(); n])?.factor_rows();
        let (mu_t, s_t) = (T::from_f64_lossy(mu), T::from_f64_lossy(s));
        let data = fill_rows(count, n, seed, |rng, out| {
            let theta = values[pick_index(&probs, rng)];
            let scale = T::from_f64_lossy(theta * g.draw_mixing(rng).sqrt()) * s_t;
            let (z0, z1) = (T::standard_normal(rng), T::standard_normal(rng));
            for (x, l) in out.iter_mut().zip(&rows) {
                *x = mu_t + scale * (l[0] * z0 + l[1] * z1);
            }
            close_row(out, center);
        });
        return Ok(SampleBatch {
            n_vars: n,
            data,
            seed,
            joint_center: Some(center),
            kind: CouplingKind::ScaleMixture,
            generator: Some(g),
            approximation: None,
        });
    }
    let grid = discretize(&vec![base.clone(); n], grid_m)?;
    let table = ra_minimize_restarts(&grid, &RaOptions { seed, ..Default::default() })?;
    let theta_max = values.iter().copied().fold(0.0, f64::max);
    let m = grid.m();
    let data = fill_rows(count, n, seed, |rng, out| {
        let theta = values[pick_index(&probs, rng)];
        let r = rng.random_range(0..m);
        for (j, x) in out.iter_mut().enumerate() {
            let atom = grid.column(j)[table.permutations[j][r]];
            *x = T::from_f64_lossy(mu + theta * (atom - mu));
        }
    });
    Ok(SampleBatch {
        n_vars: n,
        data,
        seed,
        joint_center: Some(center),
        kind: CouplingKind::ScaleMixtureRearranged,
        generator: None,
        approximation: Some(Approximation { grid_m: m, row_sum_spread: theta_max * table.row_sum_spread }),
    })
}

/// `n` vectors in `ℝᵖ`, each `E_p(0, Σ_p, ψ)`, with `X₁ + ⋯ + X_n = 0`:
/// `X = √W · A G Bᵀ` with `A Aᵀ = Σ_p` and `B Bᵀ = Φ` from [`EquicorrelationPlan`].
pub fn sample_matrix_variate_cm<T: Scalar>(
    p: usize,
    sigma_p: &DMatrix<T>,
    g: &CharacteristicGenerator,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<MatrixBatch<T>> {
    g.validate()?;
    check_count(count)?;
    if p == 0 || sigma_p.nrows() != p || sigma_p.ncols() != p {
        return domain(format!("Σ_p must be {p}x{p}, got {}x{}", sigma_p.nrows(), sigma_p.ncols()));
    }
    let a = psd_factor(sigma_p)?;
    let b = EquicorrelationPlan::<T>::new(n)?.factor()?;
    let data = fill_rows(count, p * n, seed, |rng, out| {
        let scale = T::from_f64_lossy(g.draw_mixing(rng).sqrt());
        let gauss: Vec<T> = (0..p * n).map(|_| T::standard_normal(rng)).collect();
        // AG, p × n, with G stored column-major
        let mut ag = vec![T::zero(); p * n];
        for l in 0..n {
            for i in 0..p {
                let mut s = T::zero();
                for k in 0..p {
                    s += a[(i, k)] * gauss[l * p + k];
                }
                ag[l * p + i] = s;
            }
        }
        for j in 0..n {
            for i in 0..p {
                let mut s = T::zero();
                for l in 0..n {
                    s += ag[l * p + i] * b[(j, l)];
                }
                out[j * p + i] = scale * s;
            }
        }
        for i in 0..p {
            let mut partial = T::zero();
            for j in 0..n - 1 {
                partial += out[j * p + i];
            }
            out[(n - 1) * p + i] = -partial;
        }
    });
    Ok(MatrixBatch { p, n, data, seed, generator: g.clone() })
}
