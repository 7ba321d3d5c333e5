use crate::error::{dim_err, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// QR factorization with the convention `diag(R) > 0`.
#[derive(Debug, Clone)]
pub struct QrPositive<T> {
    /// Orthogonal factor, `rows × rows`.
    pub q: Matrix<T>,
    /// Upper-triangular factor, `rows × cols`, positive diagonal.
    pub r: Matrix<T>,
}

/// Householder QR followed by a diagonal sign fix so that every `R_ii > 0`.
///
/// Accepts square or tall matrices of full column rank. Under the positive
/// diagonal convention the factorization is unique.
pub fn qr_positive<T: Real>(m: &Matrix<T>) -> Result<QrPositive<T>> {
    qr_positive_with(m, 1e-12)
}

pub fn qr_positive_with<T: Real>(m: &Matrix<T>, pivot_tol: f64) -> Result<QrPositive<T>> {
    let (rows, cols) = m.shape();
    if rows < cols || cols == 0 {
        return dim_err(format!("qr_positive needs rows >= cols > 0, got {rows}x{cols}"));
    }
    if !m.is_finite() {
        return Err(Error::SingularInput("non-finite entries".into()));
    }
    let scale = m.norm_fro();
    let mut r = m.clone();
    let mut q = Matrix::<T>::identity(rows);
    let two = T::lit(2.0);

    for k in 0..cols.min(rows - 1) {
        let x: Vec<T> = (k..rows).map(|i| r[(i, k)]).collect();
        let norm_x = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let alpha = if x[0] >= T::zero() { -norm_x } else { norm_x };
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&a| a * a).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        // R <- (I - 2 v vᵀ / vᵀv) R on rows k.., columns k..
        for j in k..cols {
            let dot: T = (k..rows).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = two * dot / vnorm2;
            for i in k..rows {
                r[(i, j)] = r[(i, j)] - f * v[i - k];
            }
        }
        // Q <- Q (I - 2 v vᵀ / vᵀv)
        for i in 0..rows {
            let dot: T = (k..rows).map(|l| q[(i, l)] * v[l - k]).sum();
            let f = two * dot / vnorm2;
            for l in k..rows {
                q[(i, l)] = q[(i, l)] - f * v[l - k];
            }
        }
        for i in k + 1..rows {
            r[(i, k)] = T::zero();
        }
    }

    let threshold = T::lit(pivot_tol) * scale;
    for k in 0..cols {
        if r[(k, k)].abs() <= threshold {
            return Err(Error::SingularInput(format!(
                "|R[{k},{k}]| = {:e} below {:e}",
                r[(k, k)].to_f64_lossy(),
                threshold.to_f64_lossy()
            )));
        }
        if r[(k, k)] < T::zero() {
            r.negate_row(k);
            q.negate_column(k);
        }
    }
    Ok(QrPositive { q, r })
}
