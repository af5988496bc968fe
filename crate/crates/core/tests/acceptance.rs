//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::Command;
use std::time::Instant;

use jointmix::couplings::{sample_jm_elliptical, sample_jm_slash, sample_matrix_variate_cm, EquicorrelationPlan};
use jointmix::distributions::UnivariateFamily as F;
use jointmix::mixability::{check_scale_inequality, jm_verdict_elliptical, not_jm_bounded_symmetric, skewnormal_noncm_certificate, skewnormal_threshold};
use jointmix::oracle::ks::{ks_critical_two_sample, ks_two_sample};
use jointmix::oracle::{brute_force_min_spread, discretize, ra_minimize_restarts, ra_runs, verify_transformed_sum, QuantileGrid, RaOptions};
use jointmix::{CharacteristicGenerator as G, SampleBatch, Verdict};
use nalgebra::DMatrix;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_dev(b: &SampleBatch<f64>, c: f64) -> f64 {
    b.row_sums().iter().map(|s| (s - c).abs()).fold(0.0, f64::max)
}

const MU: [f64; 3] = [1.0, 2.0, 3.0];
const SIGMA: [f64; 3] = [2.0, 1.5, 1.0];

fn generators() -> [G; 3] {
    [G::Normal, G::StudentT { nu: 3.0 }, G::Cauchy]
}

fn exact_elliptical() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (k, g) in generators().iter().enumerate() {
        let b = sample_jm_elliptical(&MU, &SIGMA, g, 10_000, 100 + k as u64).unwrap();
        worst = worst.max(max_dev(&b, 6.0));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-8 && secs < 5.0, format!("max |sum - 6| = {worst:.3e} (tol 1e-8), {secs:.3} s (limit 5 s)"))
}

fn matrix_variate() -> Outcome {
    let sigma_p = DMatrix::<f64>::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let (mut worst_sum, mut worst_ev) = (0.0f64, 0.0f64);
    for n in [2usize, 3, 5] {
        let b = sample_matrix_variate_cm(2, &sigma_p, &G::Normal, n, 10_000, 200 + n as u64).unwrap();
        for d in 0..b.len() {
            let s = b.column_sum(d);
            worst_sum = worst_sum.max(s[0].hypot(s[1]));
        }
        let ev = EquicorrelationPlan::<f64>::new(n).unwrap().eigenvalues();
        let top = n as f64 / (n as f64 - 1.0);
        worst_ev = worst_ev.max(ev[0].abs());
        for l in &ev[1..] {
            worst_ev = worst_ev.max((l - top).abs());
        }
    }
    outcome(
        worst_sum <= 1e-9 && worst_ev <= 1e-12,
        format!("max column-sum norm {worst_sum:.3e} (tol 1e-9), eigenvalue error {worst_ev:.3e} (tol 1e-12)"),
    )
}

fn slash() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, q) in [0.5, 2.0].into_iter().enumerate() {
        let b = sample_jm_slash(&[0.0; 3], &[1.0; 3], &G::Normal, q, 10_000, 300 + k as u64).unwrap();
        let dev = max_dev(&b, 0.0);
        let reference = F::SlashElliptical1d { mu: 0.0, sigma: 1.0, generator: G::Normal, q }.sample(100_000, 310 + k as u64).unwrap();
        let crit = ks_critical_two_sample(10_000, 100_000, 0.01);
        let worst_ks = (0..3).map(|j| ks_two_sample(&b.column(j), &reference)).fold(0.0, f64::max);
        pass &= dev <= 1e-8 && worst_ks <= crit;
        parts.push(format!("q={q}: max |sum| {dev:.3e} (tol 1e-8), max KS {worst_ks:.4} (crit {crit:.4})"));
    }
    outcome(pass, parts.join("; "))
}

fn scale_boundary() -> Outcome {
    let at = check_scale_inequality(&[2.0, 1.0, 1.0]).unwrap();
    let above = check_scale_inequality(&[2.0 + 1e-9, 1.0, 1.0]).unwrap();
    let v_at = jm_verdict_elliptical(&[2.0, 1.0, 1.0], &[0.0; 3], &G::Normal).unwrap().verdict;
    let v_above = jm_verdict_elliptical(&[2.0 + 1e-9, 1.0, 1.0], &[0.0; 3], &G::Normal).unwrap().verdict;
    outcome(
        at && !above && v_at == Verdict::JM && v_above == Verdict::NotJM,
        format!("[2,1,1] -> {v_at:?}, [2+1e-9,1,1] -> {v_above:?} (exact comparison)"),
    )
}

fn bimodal_certificate() -> Outcome {
    let f = F::BimodalPower { a: 1.0, r: 1 };
    let cdf = f.cdf(0.5);
    let verdict = not_jm_bounded_symmetric(&vec![f.clone(); 3], 1.0).unwrap().verdict;
    let opts = RaOptions { restarts: 10, ..RaOptions::default() };
    let sd = |fam: F| ra_minimize_restarts(&discretize(&vec![fam; 3], 99).unwrap(), &opts).unwrap().row_sum_stddev;
    let bimodal = sd(f);
    let uniform = sd(F::Uniform { lo: 0.0, hi: 1.0 });
    let ratio = bimodal / uniform;
    outcome(
        cdf == 0.5625 && verdict == Verdict::NotJM && bimodal >= 0.05 && uniform <= 0.02 && ratio >= 2.5,
        format!(
            "F(1/2) = {cdf} (exact 0.5625), verdict {verdict:?}; RA stddev bimodal {bimodal:.4} (>= 0.05), uniform {uniform:.4} (<= 0.02), ratio {ratio:.1} (>= 2.5)"
        ),
    )
}

fn moment_family() -> Outcome {
    let f = F::BimodalMoment { m: 1 };
    let x: f64 = 0.5;
    // f_1(x) = (2/π) x² / √(1 - x²), whose antiderivative is (asin x - x√(1 - x²)) / π
    let closed = 0.5 + (x.asin() - x * (1.0 - x * x).sqrt()) / std::f64::consts::PI;
    let density = |t: f64| 2.0 / std::f64::consts::PI * t * t / (1.0 - t * t).sqrt();
    let steps = 4000;
    let h = x / steps as f64;
    let simpson: f64 = (0..steps)
        .map(|k| {
            let a = k as f64 * h;
            h / 6.0 * (density(a) + 4.0 * density(a + 0.5 * h) + density(a + h))
        })
        .sum();
    let quad = 0.5 + simpson;
    let cdf = f.cdf(x);
    let fires = not_jm_bounded_symmetric(&vec![f; 3], 1.0).unwrap().verdict == Verdict::NotJM;
    let (e1, e2) = ((cdf - closed).abs(), (cdf - quad).abs());
    outcome(
        fires && e1 <= 1e-8 && e2 <= 1e-8,
        format!("fires: {fires}; F(1/2) = {cdf:.12}, closed-form error {e1:.2e}, quadrature error {e2:.2e} (tol 1e-8)"),
    )
}

fn skew_normal() -> Outcome {
    let silent_at_zero = (2..=6).all(|n| skewnormal_noncm_certificate(n, 0.0).unwrap().verdict == Verdict::Unknown);
    let fires_50 = skewnormal_noncm_certificate(2, 50.0).unwrap().verdict == Verdict::NotJM;
    let thresholds: Vec<f64> = (2..=6).map(|n| skewnormal_threshold(n).unwrap().unwrap_or(f64::INFINITY)).collect();
    let monotone = thresholds.windows(2).all(|w| w[0] <= w[1]);
    let shown: Vec<String> = thresholds.iter().map(|t| format!("{t:.4}")).collect();
    outcome(
        silent_at_zero && fires_50 && monotone,
        format!("silent at λ=0 for n=2..6: {silent_at_zero}; fires at n=2, λ=50: {fires_50}; λ*(2..6) = [{}] monotone: {monotone}", shown.join(", ")),
    )
}

fn oracle_soundness() -> Outcome {
    let mut rng = jointmix::rng::seeded(800);
    let (mut worst_ratio, mut monotone) = (0.0f64, true);
    for inst in 0..20 {
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let mut c: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
                c.sort_by(f64::total_cmp);
                c
            })
            .collect();
        let grid = QuantileGrid::from_columns(cols).unwrap();
        let opts = RaOptions { restarts: 100, seed: 900 + inst, ..RaOptions::default() };
        let runs = ra_runs(&grid, &opts).unwrap();
        monotone &= runs.iter().all(|r| r.is_monotone());
        let ra = ra_minimize_restarts(&grid, &opts).unwrap().row_sum_spread;
        let bf = brute_force_min_spread(&grid).unwrap().spread;
        worst_ratio = worst_ratio.max(ra / bf);
    }
    outcome(
        worst_ratio <= 1.10 && monotone,
        format!("worst RA / brute force over 20 instances {worst_ratio:.4} (limit 1.10); every sweep monotone: {monotone}"),
    )
}

fn transform_invariance() -> Outcome {
    let transforms: [fn(f64) -> f64; 3] = [|x| x * x, f64::exp, f64::abs];
    let mut worst = 0.0f64;
    for (k, g) in generators().iter().enumerate() {
        let b = sample_jm_elliptical(&MU, &SIGMA, g, 10_000, 400 + k as u64).unwrap();
        for f in &transforms {
            worst = worst.max(verify_transformed_sum(&b, 6.0, f, 1e-6).unwrap().max_rel_deviation);
        }
    }
    let b = sample_jm_slash(&[-1.0, 0.5, 0.5], &[1.0; 3], &G::StudentT { nu: 3.0 }, 2.0, 10_000, 410).unwrap();
    for f in &transforms {
        worst = worst.max(verify_transformed_sum(&b, 0.0, f, 1e-6).unwrap().max_rel_deviation);
    }
    outcome(worst <= 1e-6, format!("max relative deviation of f(sum) from f(C) {worst:.3e} (tol 1e-6)"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_jointmix");
    let commands: [&[&str]; 6] = [
        &["check", "--example", "2.3"],
        &["sample", "--sigmas", "2,1.5,1", "--mus", "1,2,3", "--generator", "student_t:3", "-N", "20000", "--seed", "5"],
        &["sample", "--coupling", "matrix", "--n", "5", "-N", "2000", "--seed", "6"],
        &["explore", "--n-grid", "2..6", "--lambda-grid", "0:100:5"],
        &["explore", "--mode", "ra", "--m-grid", "16,32", "--seed", "8"],
        &["oracle", "--marginal", "bimodal_power:1:1", "--copies", "3", "--m", "32", "--seed", "9"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let run = || Command::new(bin).args(args).output().expect("binary runs");
        let (a, b) = (run(), run());
        if a.stdout != b.stdout || a.stderr != b.stderr || a.status != b.status || a.stdout.is_empty() {
            differing.push(args[0]);
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let p = path.to_str().unwrap();
    Command::new(bin).args(["sample", "--sigmas", "1,1", "-N", "500", "--output", p]).status().unwrap();
    let run = || Command::new(bin).args(["verify", "--input", p]).output().unwrap();
    if run().stdout != run().stdout {
        differing.push("verify");
    }
    outcome(differing.is_empty(), format!("7 commands run twice; differing: {differing:?}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact elliptical JM coupling", exact_elliptical),
        ("matrix-variate complete mixability", matrix_variate),
        ("slash coupling", slash),
        ("scale inequality boundary", scale_boundary),
        ("bimodal power certificate and RA separation", bimodal_certificate),
        ("moment family fires for three copies", moment_family),
        ("skew-normal certificate", skew_normal),
        ("oracle soundness against brute force", oracle_soundness),
        ("transform invariance", transform_invariance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
