//! Matrix exponentials.

use crate::linalg::{sym_eig, Matrix};
use crate::scalar::Real;

/// Generic matrix exponential: Taylor series with scaling and squaring.
///
/// The argument is halved until `‖M‖₁ ≤ 0.5`; the series is summed until the
/// next term drops below machine precision (at most 40 terms).
pub fn expm_series<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    assert!(m.is_square());
    let n = m.rows();
    let mut squarings = 0u32;
    let mut norm = m.norm_one();
    while norm > T::lit(0.5) {
        norm = norm * T::lit(0.5);
        squarings += 1;
    }
    let scaled = m.scale(T::lit(0.5).powi(squarings as i32));
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&scaled).scale(T::one() / T::from_count(k));
        sum += &term;
        if term.max_abs() <= T::epsilon() * T::lit(0.01) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `sin(√w)/√w`, smooth at `w = 0`.
pub(crate) fn sinc_sqrt<T: Real>(w: T) -> T {
    let w = w.max(T::zero());
    if w < T::lit(1e-4) {
        T::one() - w / T::lit(6.0) + w * w / T::lit(120.0) - w * w * w / T::lit(5040.0)
    } else {
        let r = w.sqrt();
        r.sin() / r
    }
}

/// `(cos(√w) − 1)/w`, smooth at `w = 0`.
pub(crate) fn cosm1_over<T: Real>(w: T) -> T {
    let w = w.max(T::zero());
    if w < T::lit(1e-4) {
        -T::lit(0.5) + w / T::lit(24.0) - w * w / T::lit(720.0) + w * w * w / T::lit(40320.0)
    } else {
        let r = w.sqrt();
        // cos r − 1 = −2 sin²(r/2) avoids cancellation
        let h = (r * T::lit(0.5)).sin();
        -T::lit(2.0) * h * h / w
    }
}

/// Blocks of `exp([[0, Z], [−Zᵀ, 0]])` for `Z ∈ ℝ^{m×(n−m)}`.
pub(crate) struct SkewPairExp<T> {
    /// `cos √(ZZᵀ)`, m×m.
    pub c11: Matrix<T>,
    /// `sin√(ZZᵀ)/√(ZZᵀ) · Z`, m×(n−m).
    pub s12: Matrix<T>,
    /// `cos √(ZᵀZ)`, (n−m)×(n−m).
    pub c22: Matrix<T>,
}

pub(crate) fn skew_pair_blocks<T: Real>(z: &Matrix<T>) -> SkewPairExp<T> {
    let (m, k) = z.shape();
    let gram = z.matmul_tr(z);
    let eig = sym_eig(&gram).expect("Jacobi converges on Gram matrices");
    let c11 = eig.apply(|w| w.max(T::zero()).sqrt().cos());
    let s12 = eig.apply(sinc_sqrt).matmul(z);
    let c22 = &Matrix::identity(k) + &z.tr_matmul(&eig.apply(cosm1_over).matmul(z));
    debug_assert_eq!(c11.shape(), (m, m));
    SkewPairExp { c11, s12, c22: c22.symmetrized() }
}

/// `exp([[0, Z], [−Zᵀ, 0]])` in closed form from the spectral decomposition of
/// `ZZᵀ` (equivalently a thin SVD of `Z`):
///
/// ```text
/// [[ cos√(ZZᵀ),                Z·sin√(ZᵀZ)/√(ZᵀZ) ],
///  [ −sin√(ZᵀZ)/√(ZᵀZ)·Zᵀ,     cos√(ZᵀZ)          ]]
/// ```
///
/// The result lies in `SO(n)`.
pub fn exp_skew_pair<T: Real>(z: &Matrix<T>) -> Matrix<T> {
    let b = skew_pair_blocks(z);
    let s21 = -b.s12.transpose();
    Matrix::from_blocks(&b.c11, &b.s12, &s21, &b.c22)
}
