//! Dense linear algebra with the conventions the manifold formulas rely on:
//! positive-diagonal QR, upper Cholesky, descending symmetric eigenpairs and
//! the closed-form exponential of skew block matrices.

mod cholesky;
mod eig;
mod expm;
mod lu;
mod matrix;
mod qr;

pub use cholesky::{cholesky_upper, spd_inverse, upper_triangular_inverse};
pub use eig::{sym_eig, sym_eig_with, SymEig};
pub use expm::{exp_skew_pair, expm_series};
pub use lu::{det, Lu};
pub use matrix::Matrix;
pub use qr::{qr_positive, qr_positive_with, QrPositive};

use crate::scalar::Real;

/// Cayley transform `(2I + Ω)(2I − Ω)⁻¹`.
pub fn cayley<T: Real>(omega: &Matrix<T>) -> crate::error::Result<Matrix<T>> {
    let n = omega.rows();
    let two = Matrix::<T>::identity(n).scale(T::lit(2.0));
    // the two factors commute, so (2I − Ω)⁻¹(2I + Ω) is the same matrix
    let denom = Lu::factor(&(&two - omega), 1e-14)?;
    Ok(denom.solve_matrix(&(&two + omega)))
}
