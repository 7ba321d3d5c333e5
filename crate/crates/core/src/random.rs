//! Seeded random matrices. Every generator is deterministic for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;
use crate::scalar::Real;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard normal entries.
pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::lit(rng.sample::<f64, _>(StandardNormal)))
}

/// Symmetric matrix `(G + Gᵀ)/2` for Gaussian `G`.
pub fn symmetric<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    gaussian::<T, R>(rng, n, n).symmetrized()
}

/// Skew-symmetric matrix `(G − Gᵀ)/2` for Gaussian `G`.
pub fn skew<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let g = gaussian::<T, R>(rng, n, n);
    (&g - &g.transpose()).scale(T::lit(0.5))
}

/// Haar-like element of `SO(n)`: the positive-diagonal QR factor of a
/// Gaussian matrix with its last column negated when the determinant is −1.
pub fn special_orthogonal<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    loop {
        let g = gaussian::<T, R>(rng, n, n);
        if let Ok(f) = crate::linalg::qr_positive(&g) {
            let mut q = f.q;
            if crate::linalg::det(&q) < T::zero() {
                q.negate_column(n - 1);
            }
            return q;
        }
    }
}
