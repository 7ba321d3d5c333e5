use crate::error::{dim_err, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Upper Cholesky factor `R` with `RᵀR = S` and `diag(R) > 0`.
pub fn cholesky_upper<T: Real>(s: &Matrix<T>) -> Result<Matrix<T>> {
    if !s.is_square() {
        return dim_err(format!("cholesky of non-square {:?}", s.shape()));
    }
    let n = s.rows();
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d = d - r[(k, j)] * r[(k, j)];
        }
        if !(d > T::zero()) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d.to_f64_lossy() });
        }
        let rjj = d.sqrt();
        r[(j, j)] = rjj;
        for i in j + 1..n {
            let mut v = s[(j, i)];
            for k in 0..j {
                v = v - r[(k, j)] * r[(k, i)];
            }
            r[(j, i)] = v / rjj;
        }
    }
    Ok(r)
}

/// Inverse of a nonsingular upper-triangular matrix by back substitution.
pub fn upper_triangular_inverse<T: Real>(r: &Matrix<T>) -> Result<Matrix<T>> {
    let n = r.rows();
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        for i in (0..=j).rev() {
            let mut v = if i == j { T::one() } else { T::zero() };
            for k in i + 1..=j {
                v = v - r[(i, k)] * inv[(k, j)];
            }
            if r[(i, i)] == T::zero() {
                return Err(Error::SingularInput(format!("zero diagonal at {i}")));
            }
            inv[(i, j)] = v / r[(i, i)];
        }
    }
    Ok(inv)
}

/// Inverse of a symmetric positive definite matrix through its Cholesky factor.
pub fn spd_inverse<T: Real>(s: &Matrix<T>) -> Result<Matrix<T>> {
    let rinv = upper_triangular_inverse(&cholesky_upper(s)?)?;
    Ok(rinv.matmul_tr(&rinv).symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Matrix<f64>;

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(cholesky_upper(&M::identity(3)).unwrap(), M::identity(3));
        let r = cholesky_upper(&M::diag(&[4.0, 9.0])).unwrap();
        assert!((&r - &M::diag(&[2.0, 3.0])).max_abs() < 1e-15);
    }

    #[test]
    fn gram_plus_identity_reconstructs() {
        let z = M::from_rows(&[vec![0.3, -1.2], vec![2.0, 0.1], vec![-0.7, 0.4]]).unwrap();
        let s = &M::identity(3) + &z.matmul_tr(&z);
        let r = cholesky_upper(&s).unwrap();
        assert!((&r.tr_matmul(&r) - &s).norm_fro() <= 1e-12 * s.norm_fro());
        for i in 0..3 {
            assert!(r[(i, i)] > 0.0);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let s = M::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky_upper(&s), Err(Error::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn triangular_inverse() {
        let r = M::from_rows(&[vec![2.0, 1.0, -1.0], vec![0.0, 3.0, 0.5], vec![0.0, 0.0, 0.25]]).unwrap();
        let inv = upper_triangular_inverse(&r).unwrap();
        assert!((&r.matmul(&inv) - &M::identity(3)).max_abs() < 1e-14);
    }
}
