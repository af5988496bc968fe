//! Normalizing constants obtained by quadrature, computed once per parameter set.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::quadrature::{integrate, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    GeneralizedLogistic(u64, u64),
    Kotz(u64, u64, u64),
}

fn cache() -> &'static RwLock<HashMap<Key, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(key: Key, compute: impl FnOnce() -> f64) -> f64 {
    if let Some(&c) = cache().read().expect("constant cache poisoned").get(&key) {
        return c;
    }
    let value = compute();
    *cache().write().expect("constant cache poisoned").entry(key).or_insert(value)
}

const TIGHT: Tolerance = Tolerance { abs: 1e-14, rel: 1e-14, max_subdivisions: 10_000 };

/// `C` such that `C exp(-α|x|^β) / (1 + exp(-|x|^β))^(2α)` integrates to one.
pub(crate) fn generalized_logistic(alpha: f64, beta: f64) -> f64 {
    cached(Key::GeneralizedLogistic(alpha.to_bits(), beta.to_bits()), || {
        let half = integrate(|x| generalized_logistic_kernel(alpha, beta, x), 0.0, f64::INFINITY, TIGHT);
        1.0 / (2.0 * half.value)
    })
}

pub(crate) fn generalized_logistic_kernel(alpha: f64, beta: f64, x: f64) -> f64 {
    let t = x.abs().powf(beta);
    (-alpha * t - 2.0 * alpha * (-t).exp().ln_1p()).exp()
}

/// `C` such that `C z^(2(N-1)) exp(-m z^(2β))` integrates to one over the real line.
pub(crate) fn kotz(n: f64, m: f64, beta: f64) -> f64 {
    cached(Key::Kotz(n.to_bits(), m.to_bits(), beta.to_bits()), || {
        let half = integrate(|z| kotz_kernel(n, m, beta, z), 0.0, f64::INFINITY, TIGHT);
        1.0 / (2.0 * half.value)
    })
}

pub(crate) fn kotz_kernel(n: f64, m: f64, beta: f64, z: f64) -> f64 {
    let r = z * z;
    if r == 0.0 {
        return 0.0;
    }
    ((n - 1.0) * r.ln() - m * r.powf(beta)).exp()
}
