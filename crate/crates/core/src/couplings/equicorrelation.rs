use nalgebra::DMatrix;

use super::linalg::{psd_factor, symmetric_eigenvalues};
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// `Φ = (1 - ρ) I + ρ e eᵀ` with `ρ = -1/(n - 1)`: unit diagonal and zero row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct EquicorrelationPlan<T: Scalar> {
    pub n: usize,
    pub rho: T,
    pub phi: DMatrix<T>,
}

impl<T: Scalar> EquicorrelationPlan<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("equicorrelation needs n >= 2, got {n}"));
        }
        let rho = -T::one() / T::from_count(n - 1);
        let phi = DMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { rho });
        Ok(Self { n, rho, phi })
    }

    /// `B` with `B Bᵀ = Φ`.
    pub fn factor(&self) -> Result<DMatrix<T>> {
        psd_factor(&self.phi)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_and_row_sums() {
        for n in 2..=8 {
            let plan = EquicorrelationPlan::<f64>::new(n).unwrap();
            let ev = plan.eigenvalues();
            assert!(ev[0].abs() < 1e-12);
            let top = n as f64 / (n as f64 - 1.0);
            assert!(ev[1..].iter().all(|l| (l - top).abs() < 1e-12));
            for i in 0..n {
                assert!(plan.phi.row(i).sum().abs() < 1e-14);
                assert_eq!(plan.phi[(i, i)], 1.0);
            }
            let b = plan.factor().unwrap();
            assert!((&b * b.transpose() - &plan.phi).abs().max() < 1e-12);
            // Bᵀ e = 0: each column of B sums to zero
            assert!(b.row_sum().abs().max() < 1e-12, "n = {n}: {}", b.row_sum());
        }
        assert!(EquicorrelationPlan::<f64>::new(1).is_err());
    }
}
