use std::f64::consts::PI;

use super::*;
use crate::generators::ScaleAtom;
use crate::oracle::ks::{ks_critical_one_sample, ks_statistic};
use crate::quadrature::{integrate, Tolerance};

fn catalogue() -> Vec<UnivariateFamily> {
    use CharacteristicGenerator as G;
    use UnivariateFamily::*;
    vec![
        LocationScaleSymmetric { base: SymmetricBase::Uniform, mu: 0.5, theta: 2.0 },
        LocationScaleSymmetric { base: SymmetricBase::Triangular, mu: 0.0, theta: 1.0 },
        LocationScaleSymmetric { base: SymmetricBase::Generator { generator: G::StudentT { nu: 3.0 } }, mu: 1.0, theta: 2.0 },
        Uniform { lo: -1.0, hi: 1.0 },
        Uniform { lo: 0.0, hi: 1.0 },
        Elliptical1d { mu: 1.0, sigma: 2.0, generator: G::Normal },
        Elliptical1d { mu: 0.0, sigma: 1.0, generator: G::StudentT { nu: 3.0 } },
        Elliptical1d { mu: 0.0, sigma: 1.0, generator: G::Cauchy },
        Elliptical1d { mu: -1.0, sigma: 0.5, generator: G::PearsonVii { n: 2.0, m: 3.0 } },
        Elliptical1d {
            mu: 0.0,
            sigma: 1.0,
            generator: G::DiscreteMixture {
                atoms: vec![ScaleAtom { weight: 0.3, scale: 0.5 }, ScaleAtom { weight: 0.7, scale: 2.0 }],
            },
        },
        BimodalPower { a: 1.0, r: 1 },
        BimodalPower { a: 2.0, r: 3 },
        BimodalMoment { m: 0 },
        BimodalMoment { m: 1 },
        BimodalMoment { m: 3 },
        BimodalMomentMixture { terms: vec![MomentTerm { m: 1, weight: 2.0 }, MomentTerm { m: 2, weight: 1.0 }] },
        GeneralizedLogistic { alpha: 1.0, beta: 1.0 },
        GeneralizedLogistic { alpha: 1.0, beta: 2.0 },
        GeneralizedLogistic { alpha: 0.5, beta: 1.5 },
        KotzType { n: 2.0, m: 1.0, beta: 1.0, mu: 0.0, sigma: 1.0 },
        KotzType { n: 1.5, m: 0.5, beta: 2.0, mu: 1.0, sigma: 2.0 },
        SkewNormal { mu: 0.0, sigma: 1.0, lambda: 1.0 },
        SkewNormal { mu: 1.0, sigma: 2.0, lambda: -3.0 },
        Ssmn { mu: 0.0, sigma: 1.0, lambda: 2.0, h: DiscreteLaw::new(&[(0.5, 0.5), (2.0, 0.5)]).unwrap() },
        SlashElliptical1d { mu: 0.0, sigma: 1.0, generator: G::Normal, q: 2.0 },
        SlashElliptical1d { mu: 1.0, sigma: 1.0, generator: G::Normal, q: 1.0 },
        SlashElliptical1d { mu: 0.0, sigma: 2.0, generator: G::StudentT { nu: 5.0 }, q: 3.0 },
        Mixture {
            components: vec![
                MixtureComponent { weight: 0.5, family: Uniform { lo: -1.0, hi: -0.9 } },
                MixtureComponent { weight: 0.5, family: Uniform { lo: 0.9, hi: 1.0 } },
            ],
        },
        Symmetrized { inner: Box::new(Uniform { lo: 0.9, hi: 1.0 }) },
        Symmetrized { inner: Box::new(SkewNormal { mu: 0.0, sigma: 1.0, lambda: 4.0 }) },
    ]
}

#[test]
fn catalogue_is_valid() {
    for f in catalogue() {
        f.validate().unwrap_or_else(|e| panic!("{f:?}: {e}"));
    }
}

#[test]
fn bimodal_power_values() {
    let f = UnivariateFamily::BimodalPower { a: 1.0, r: 1 };
    assert_eq!(f.density(1.0), 1.5);
    assert_eq!(f.density(0.0), 0.0);
    assert_eq!(f.density(1.5), 0.0);
    assert_eq!(f.cdf(0.5), 0.5625);
    // F(a/2) = 1/2 + 1/2^(2r+2)
    for r in 1..6 {
        let g = UnivariateFamily::BimodalPower { a: 3.0, r };
        assert!((g.cdf(1.5) - (0.5 + 0.5f64.powi(2 * r as i32 + 2))).abs() < 1e-15);
    }
    assert!((f.quantile(0.5625).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn arcsine_constant_matches_quadrature() {
    // C_0 = 1 / ∫(1 - x²)^(-1/2), integrated through x = sin t to remove the endpoint singularity
    let oracle = integrate(|t: f64| t.cos() / (1.0 - t.sin().powi(2)).sqrt(), -PI / 2.0, PI / 2.0, Tolerance::default());
    let f = UnivariateFamily::BimodalMoment { m: 0 };
    assert!((f.density(0.0) - 1.0 / oracle.value).abs() < 1e-10);
    assert!((f.density(0.0) - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn moment_cdf_agrees_with_quadrature_and_closed_form() {
    let f = UnivariateFamily::BimodalMoment { m: 1 };
    // C_1 = 1 / B(3/2, 1/2) = 2/π
    assert!((f.density(0.5) - 2.0 / PI * 0.25 / 0.75f64.sqrt()).abs() < 1e-14);
    for &x in &[-0.9, -0.5, 0.0, 0.25, 0.5, 0.99] {
        let via_sin = 0.5 + integrate(
            |t: f64| 2.0 / PI * t.sin().powi(2),
            0.0,
            f64::asin(x),
            Tolerance::absolute(1e-14),
        )
        .value;
        let closed = 0.5 + (x.asin() - x * (1.0 - x * x).sqrt()) / PI;
        assert!((f.cdf(x) - via_sin).abs() < 1e-12, "x={x}");
        assert!((f.cdf(x) - closed).abs() < 1e-12, "x={x}");
    }
}

#[test]
fn quantile_examples() {
    let u = UnivariateFamily::Uniform { lo: -1.0, hi: 1.0 };
    assert_eq!(u.quantile(0.75).unwrap(), 0.5);
    assert!(u.quantile(0.0).is_err());
    assert!(u.quantile(1.0).is_err());
    assert!(u.quantile(f64::NAN).is_err());

    // independent oracle: erf by its Maclaurin series, inverted by bisection
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        2.0 / PI.sqrt() * sum
    }
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * (1.0 + erf_series(mid / 2f64.sqrt())) < 0.975 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = UnivariateFamily::standard_normal().quantile(0.975).unwrap();
    assert!((z - lo).abs() < 1e-12);
    assert!((z - 1.959964).abs() < 1e-6);
}

#[test]
fn quantile_inverts_cdf() {
    for f in catalogue() {
        let scale = f.scale_hint();
        let (lo, hi) = f.support();
        for k in 1..20 {
            let x = f.location_hint() + scale * (k as f64 - 10.0) / 4.0;
            if x <= lo || x >= hi {
                continue;
            }
            let p = f.cdf(x);
            if p < 1e-6 || p > 1.0 - 1e-6 || f.density(x) < 1e-3 {
                continue;
            }
            let back = f.quantile(p).unwrap();
            assert!((back - x).abs() < 1e-8, "{f:?}: x={x}, p={p}, back={back}");
        }
    }
}

#[test]
fn densities_are_normalized() {
    for f in catalogue() {
        let (lo, hi) = f.support();
        let total = match f {
            // integrable endpoint singularities: integrate in the angle variable
            UnivariateFamily::BimodalMoment { .. } | UnivariateFamily::BimodalMomentMixture { .. } => integrate(
                |t: f64| f.density(t.sin()) * t.cos(),
                -PI / 2.0,
                PI / 2.0,
                Tolerance::absolute(1e-10),
            ),
            _ => integrate(|x| f.density(x), lo, hi, Tolerance::absolute(1e-9)),
        };
        assert!((total.value - 1.0).abs() < 1e-6, "{f:?}: {}", total.value);
    }
}

#[test]
fn moment_density_normalized_by_plain_adaptive_quadrature() {
    let f = UnivariateFamily::BimodalMoment { m: 2 };
    let total = integrate(|x| f.density(x), -1.0, 1.0, Tolerance::absolute(1e-9));
    assert!((total.value - 1.0).abs() < 1e-6, "{total:?}");
}

#[test]
fn symmetry_flag_is_honest() {
    for f in catalogue() {
        let flags = f.flags();
        let Some(mu) = f.center() else {
            assert!(!flags.symmetric);
            continue;
        };
        let s = f.scale_hint();
        for k in 0..=100 {
            let x = 3.0 * s * k as f64 / 100.0;
            let (a, b) = (f.density(mu + x), f.density(mu - x));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{f:?} at ±{x}: {a} vs {b}");
        }
    }
}

fn unimodal_on_grid(f: &UnivariateFamily) -> bool {
    let s = f.scale_hint();
    let mid = f.location_hint();
    let vals: Vec<f64> = (0..=200).map(|k| f.density(mid + 4.0 * s * (k as f64 - 100.0) / 100.0)).collect();
    let mut decreasing = false;
    for w in vals.windows(2) {
        let slack = 1e-12 * w[0].max(w[1]);
        if w[1] < w[0] - slack {
            decreasing = true;
        } else if decreasing && w[1] > w[0] + slack {
            return false;
        }
    }
    true
}

#[test]
fn unimodality_flag_is_honest() {
    for f in catalogue() {
        if f.flags().unimodal {
            assert!(unimodal_on_grid(&f), "{f:?} flagged unimodal");
        }
    }
    for f in [
        UnivariateFamily::BimodalPower { a: 1.0, r: 1 },
        UnivariateFamily::KotzType { n: 2.0, m: 1.0, beta: 1.0, mu: 0.0, sigma: 1.0 },
        UnivariateFamily::KotzType { n: 1.5, m: 0.5, beta: 2.0, mu: 1.0, sigma: 2.0 },
    ] {
        assert!(!f.flags().unimodal);
        assert!(!unimodal_on_grid(&f));
        let c = f.center().unwrap();
        let s = f.scale_hint();
        assert!(f.density(c) < f.density(c + 0.5 * s) && f.density(c) < f.density(c - 0.5 * s));
    }
}

#[test]
fn cdf_is_half_at_center_and_monotone() {
    for f in catalogue() {
        if let Some(mu) = f.center() {
            assert!((f.cdf(mu) - 0.5).abs() < 1e-10, "{f:?}");
        }
        let s = f.scale_hint();
        let mut prev = 0.0;
        for k in 0..=80 {
            let x = f.location_hint() + s * (k as f64 - 40.0) / 8.0;
            let c = f.cdf(x);
            assert!(c >= prev - 1e-13, "{f:?} decreases at {x}");
            prev = c;
        }
    }
}

#[test]
fn samplers_match_cdfs() {
    let n = 100_000;
    let crit = ks_critical_one_sample(n, 0.01);
    assert!(crit <= 1.63 / (n as f64).sqrt());
    for (i, f) in catalogue().iter().enumerate() {
        let xs = f.sample(n, 20_000 + i as u64).unwrap();
        let d = ks_statistic(&xs, |x| f.cdf(x));
        assert!(d <= crit, "{f:?}: KS {d} > {crit}");
    }
}

#[test]
fn skew_normal_sampler_moments() {
    let n = 1_000_000;
    let f = UnivariateFamily::SkewNormal { mu: 0.0, sigma: 1.0, lambda: 1.0 };
    let xs = f.sample(n, 3).unwrap();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - 1.0 / PI.sqrt()).abs() < 3.0 * se, "mean {mean}");

    // oracle for P(X < 0): numeric integral of 2φ(x)Φ(λx) over (-∞, 0)
    let neg_mass = integrate(
        |x: f64| 2.0 * (-0.5 * x * x).exp() / (2.0 * PI).sqrt() * 0.5 * statrs::function::erf::erfc(-x / 2f64.sqrt()),
        f64::NEG_INFINITY,
        0.0,
        Tolerance::default(),
    )
    .value;
    assert!((neg_mass - 0.25).abs() < 1e-10);
    let frac = xs.iter().filter(|&&x| x < 0.0).count() as f64 / n as f64;
    let se = (neg_mass * (1.0 - neg_mass) / n as f64).sqrt();
    assert!((frac - neg_mass).abs() < 3.0 * se, "P(X<0) {frac}");

    let sym = UnivariateFamily::SkewNormal { mu: 0.0, sigma: 1.0, lambda: 0.0 }.sample(n, 4).unwrap();
    let frac = sym.iter().filter(|&&x| x < 0.0).count() as f64 / n as f64;
    assert!((frac - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
}

#[test]
fn kotz_constant_matches_gamma_closed_form() {
    let (n, m, beta) = (1.5, 0.5, 2.0);
    let f = UnivariateFamily::KotzType { n, m, beta, mu: 0.0, sigma: 1.0 };
    let a = (n - 0.5) / beta;
    let closed = beta * m.powf(a) / crate::special::ln_gamma(a).exp();
    // density at z = 1: C * 1 * exp(-m)
    assert!((f.density(1.0) - closed * (-m).exp()).abs() < 1e-12);
}

#[test]
fn generalized_logistic_reduces_to_logistic() {
    let f = UnivariateFamily::GeneralizedLogistic { alpha: 1.0, beta: 1.0 };
    for &x in &[-3.0, -0.5, 0.0, 1.0, 4.0] {
        let logistic = 1.0 / (1.0 + f64::exp(-x));
        assert!((f.cdf(x) - logistic).abs() < 1e-10, "x={x}");
    }
}

#[test]
fn samplers_are_deterministic() {
    for f in catalogue() {
        assert_eq!(f.sample(50, 9).unwrap(), f.sample(50, 9).unwrap());
    }
    assert!(catalogue()[0].sample(0, 1).is_err());
}

#[test]
fn invalid_families_are_rejected() {
    use UnivariateFamily::*;
    assert!(Uniform { lo: 1.0, hi: 1.0 }.validate().is_err());
    assert!(BimodalPower { a: 1.0, r: 0 }.validate().is_err());
    assert!(KotzType { n: 1.0, m: 1.0, beta: 1.0, mu: 0.0, sigma: 1.0 }.validate().is_err());
    assert!(SlashElliptical1d { mu: 0.0, sigma: 1.0, generator: CharacteristicGenerator::Normal, q: 0.0 }
        .validate()
        .is_err());
    assert!(DiscreteLaw::new(&[(0.0, 1.0)]).is_err());
    assert!(DiscreteLaw::new(&[(1.0, 0.5)]).is_err());
}

#[test]
fn json_and_shorthand_forms() {
    let f: UnivariateFamily = r#"{"family":"bimodal_power","a":1,"r":1}"#.parse().unwrap();
    assert_eq!(f, UnivariateFamily::BimodalPower { a: 1.0, r: 1 });
    assert_eq!("bimodal_power:1:1".parse::<UnivariateFamily>().unwrap(), f);
    let k: UnivariateFamily = r#"{"family":"kotz_type","n":2,"m":1,"beta":1}"#.parse().unwrap();
    assert_eq!(k.center(), Some(0.0));
    let s: UnivariateFamily =
        r#"{"family":"slash_elliptical_1d","mu":0,"sigma":1,"q":2,"generator":{"kind":"student_t","nu":3}}"#
            .parse()
            .unwrap();
    assert!(s.flags().symmetric);
    let h: DiscreteLaw = "0.5@0.5,2@0.5".parse().unwrap();
    assert_eq!(h.values(), vec![0.5, 2.0]);
}
