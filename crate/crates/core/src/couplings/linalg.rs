//! Symmetric eigendecomposition and PSD square roots.
//!
//! Decompositions run in `f64` through nalgebra regardless of the caller's scalar.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

fn to_f64<T: Scalar>(m: &DMatrix<T>) -> DMatrix<f64> {
    m.map(|x| x.to_f64_lossy())
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(to_f64(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `A` with `A Aᵀ = M` from the eigendecomposition of a symmetric PSD `M`.
///
/// Eigenvalues below `-1e-10 · trace` are rejected; those within that tolerance of zero
/// are set to zero, so null directions of `M` stay null directions of `Aᵀ`.
pub fn psd_factor<T: Scalar>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !m.is_square() || m.nrows() == 0 {
        return domain(format!("expected a nonempty square matrix, got {}x{}", m.nrows(), m.ncols()));
    }
    let mf = to_f64(m);
    if mf.iter().any(|x| !x.is_finite()) {
        return domain("matrix has non-finite entries");
    }
    let asym = (&mf - mf.transpose()).abs().max();
    let trace = mf.trace();
    if asym > 1e-12 * trace.abs().max(1.0) {
        return domain(format!("matrix is not symmetric (max asymmetry {asym})"));
    }
    let eig = SymmetricEigen::new(mf);
    let tolerance = 1e-10 * trace.abs();
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < -tolerance {
        return Err(Error::NotPsd { min_eigenvalue, tolerance });
    }
    let roots = eig.eigenvalues.map(|l| if l <= tolerance { 0.0 } else { l.sqrt() });
    let factor = eig.eigenvectors * DMatrix::from_diagonal(&roots);
    Ok(factor.map(T::from_f64_lossy))
}
