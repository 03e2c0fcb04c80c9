use super::{herm_eig, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest eigenvalue of a Hermitian matrix (zero for an empty matrix).
pub fn min_eigenvalue<T: Real>(m: &Matrix<T>) -> Result<T> {
    Ok(herm_eig(m)?.min())
}

/// `true` iff `λ_min(M) >= -tol`.
pub fn is_psd<T: Real>(m: &Matrix<T>, tol: T) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= -tol)
}

/// Hermitian square root `C` with `C C^H = M`, clamping eigenvalues in
/// `[-PSD_TOL, 0)` to zero.
pub fn psd_sqrt<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    psd_sqrt_with_tol(m, T::lit(T::PSD_TOL))
}

pub fn psd_sqrt_with_tol<T: Real>(m: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    let e = herm_eig(m)?;
    let lmin = e.min();
    if lmin < -tol {
        return Err(Error::NotPsd(lmin.as_f64()));
    }
    Ok(e.reconstruct_with(|l| l.max(T::zero()).sqrt()))
}
