use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::mixability::check_scale_inequality;
use crate::scalar::Scalar;

/// Unit vectors `v_i` in the plane with `Σ σ_i v_i = 0`, and the scatter matrix
/// `Σ_ij = σ_i σ_j ⟨v_i, v_j⟩` they induce.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonCoupling<T: Scalar> {
    pub sigma: Vec<T>,
    pub unit_vectors: Vec<[T; 2]>,
    pub scatter: DMatrix<T>,
}

impl<T: Scalar> PolygonCoupling<T> {
    pub fn new(sigma: &[T]) -> Result<Self> {
        let unit_vectors = polygon_unit_vectors(sigma)?;
        let n = sigma.len();
        let scatter = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (unit_vectors[i], unit_vectors[j]);
            sigma[i] * sigma[j] * (a[0] * b[0] + a[1] * b[1])
        });
        Ok(Self { sigma: sigma.to_vec(), unit_vectors, scatter })
    }

    /// Rows `σ_i v_i` of the rank-2 factor `L` with `L Lᵀ = Σ`.
    pub fn factor_rows(&self) -> Vec<[T; 2]> {
        self.sigma.iter().zip(&self.unit_vectors).map(|(&s, v)| [s * v[0], s * v[1]]).collect()
    }
}

fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

/// Closes a polygon whose side lengths are given in descending order.
fn close<T: Scalar>(sides: &[T]) -> Vec<[T; 2]> {
    let n = sides.len();
    let (zero, one) = (T::zero(), T::one());
    match n {
        2 => vec![[one, zero], [-one, zero]],
        3 => {
            let (s1, s2, s3) = (sides[0], sides[1], sides[2]);
            let cos = ((s3 * s3 - s1 * s1 - s2 * s2) / (two::<T>() * s1 * s2)).max(-one).min(one);
            let sin = (one - cos * cos).max(zero).sqrt();
            let v2 = [cos, sin];
            let v3 = [-(s1 + s2 * cos) / s3, -(s2 * sin) / s3];
            vec![[one, zero], v2, v3]
        }
        _ => {
            let (a, b) = (sides[n - 2], sides[n - 1]);
            let others = &sides[..n - 2];
            let total: T = others.iter().copied().sum();
            let largest = others[0];
            let lo = (a - b).abs().max(two::<T>() * largest - total);
            let hi = (a + b).min(total);
            let r = if lo < hi { (lo + hi) / two::<T>() } else { hi };
            // insert the resultant side, keeping descending order
            let pos = others.iter().position(|&s| s < r).unwrap_or(others.len());
            let mut reduced = others.to_vec();
            reduced.insert(pos, r);
            let mut vectors = close(&reduced);
            let u = vectors.remove(pos);
            let cos = ((a * a + r * r - b * b) / (two::<T>() * a * r)).max(-one).min(one);
            let sin = (one - cos * cos).max(zero).sqrt();
            let va = [u[0] * cos - u[1] * sin, u[0] * sin + u[1] * cos];
            let vb = [(r * u[0] - a * va[0]) / b, (r * u[1] - a * va[1]) / b];
            vectors.push(va);
            vectors.push(vb);
            vectors
        }
    }
}

/// Unit vectors closing the polygon with side lengths `σ`, in input order.
///
/// Sides are processed in descending order (ties by position); `n = 3` uses the law of
/// cosines and larger `n` repeatedly merges the two shortest sides into a resultant
/// that keeps the polygon inequality, then unfolds.
pub fn polygon_unit_vectors<T: Scalar>(sigma: &[T]) -> Result<Vec<[T; 2]>> {
    if sigma.iter().any(|s| !(s.is_finite() && *s > T::zero())) {
        return domain("side lengths must be positive and finite");
    }
    if !check_scale_inequality(sigma)? {
        let sum: T = sigma.iter().copied().sum();
        let max = sigma.iter().copied().fold(T::zero(), T::max);
        return Err(Error::PolygonInequality { sum: sum.to_f64_lossy(), max: max.to_f64_lossy() });
    }
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite").then(i.cmp(&j)));
    let sorted: Vec<T> = order.iter().map(|&i| sigma[i]).collect();
    let closed = close(&sorted);
    let mut out = vec![[T::zero(); 2]; sigma.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = closed[k];
    }
    Ok(out)
}

/// Scatter matrix of the polygon coupling: PSD, rank ≤ 2, diagonal `σ_i²`, zero total sum.
pub fn elliptical_jm_covariance<T: Scalar>(sigma: &[T]) -> Result<DMatrix<T>> {
    Ok(PolygonCoupling::new(sigma)?.scatter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::linalg::symmetric_eigenvalues;

    fn closure<T: Scalar>(sigma: &[T], v: &[[T; 2]]) -> f64 {
        let (x, y) = sigma.iter().zip(v).fold((0.0, 0.0), |(x, y), (&s, w)| {
            (x + s.to_f64_lossy() * w[0].to_f64_lossy(), y + s.to_f64_lossy() * w[1].to_f64_lossy())
        });
        x.hypot(y)
    }

    #[test]
    fn antithetic_pair() {
        assert_eq!(polygon_unit_vectors(&[1.0, 1.0]).unwrap(), vec![[1.0, 0.0], [-1.0, 0.0]]);
        assert_eq!(elliptical_jm_covariance(&[1.0, 1.0]).unwrap(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn equilateral_triangle() {
        let v = polygon_unit_vectors(&[1.0f64, 1.0, 1.0]).unwrap();
        for i in 0..3 {
            for j in 0..i {
                let dot = v[i][0] * v[j][0] + v[i][1] * v[j][1];
                assert!((dot + 0.5).abs() < 1e-15);
            }
        }
        let s = elliptical_jm_covariance(&[1.0f64, 1.0, 1.0]).unwrap();
        assert!((s[(0, 1)] + 0.5).abs() < 1e-15 && (s[(1, 2)] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn law_of_cosines_triangle() {
        let sigma = [2.0f64, 1.5, 1.0];
        let v = polygon_unit_vectors(&sigma).unwrap();
        assert!(closure(&sigma, &v) <= 1e-10);
        // interior angle between sides 1 and 2 is opposite side 3; the edge vectors meet at its supplement
        let interior = (sigma[0] * sigma[0] + sigma[1] * sigma[1] - sigma[2] * sigma[2]) / (2.0 * sigma[0] * sigma[1]);
        let dot = v[0][0] * v[1][0] + v[0][1] * v[1][1];
        assert!((dot + interior).abs() < 1e-15);
        let s = elliptical_jm_covariance(&sigma).unwrap();
        assert!(s.sum().abs() <= 1e-9 * 6.25);
    }

    #[test]
    fn boundary_triangle_is_degenerate() {
        let v = polygon_unit_vectors(&[2.0, 1.0, 1.0]).unwrap();
        assert_eq!(v, vec![[1.0, 0.0], [-1.0, 0.0], [-1.0, 0.0]]);
    }

    #[test]
    fn many_sides_close() {
        let cases: Vec<Vec<f64>> = vec![
            vec![1.0; 4],
            vec![3.0, 1.0, 1.0, 1.0],
            vec![0.3, 2.0, 1.1, 0.7, 0.5, 1.9],
            vec![5.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            (1..=12).map(|k| k as f64).collect(),
        ];
        for sigma in cases {
            let v = polygon_unit_vectors(&sigma).unwrap();
            let total: f64 = sigma.iter().sum();
            assert!(closure(&sigma, &v) <= 1e-10 * total, "{sigma:?}");
            for w in &v {
                assert!((w[0].hypot(w[1]) - 1.0).abs() < 1e-12, "{sigma:?}");
            }
            let s = elliptical_jm_covariance(&sigma).unwrap();
            let trace = s.trace();
            let ev = symmetric_eigenvalues(&s);
            assert!(ev[0] >= -1e-10 * trace);
            assert!(ev.iter().filter(|&&l| l.abs() > 1e-10 * trace).count() <= 2);
            assert!(s.sum().abs() <= 1e-9 * trace);
            for i in 0..sigma.len() {
                assert!((s[(i, i)] - sigma[i] * sigma[i]).abs() < 1e-12 * trace);
            }
        }
    }

    #[test]
    fn single_precision() {
        let sigma = [2.0f32, 1.5, 1.0, 0.75];
        let v = polygon_unit_vectors(&sigma).unwrap();
        assert!(closure(&sigma, &v) <= 1e-5);
    }

    #[test]
    fn violated_inequality_is_reported() {
        assert!(matches!(polygon_unit_vectors(&[3.0, 1.0, 1.0]), Err(Error::PolygonInequality { .. })));
        assert!(matches!(polygon_unit_vectors(&[1.0]), Err(Error::PolygonInequality { .. })));
        assert!(polygon_unit_vectors(&[1.0, -1.0]).is_err());
        assert!(polygon_unit_vectors::<f64>(&[]).is_err());
    }
}
