//! The Lagrange Grassmannian `LG(n) ⊂ Gr(n, 2n)`: projectors with `PJP = 0`.
//!
//! Frames are orthogonal and symplectic, and tangent parameters are
//! symmetric `n×n` matrices, `ξ = Θᵀ [[0, Z], [Z, 0]] Θ`. Distances and
//! geodesics are those of the ambient Grassmannian.

mod charts;

pub use charts::{
    lg_chart, lg_chart_cayley, lg_chart_cayley_direct, lg_chart_exp, lg_chart_qr, lg_chart_rotation, lg_qr_factor,
};

use crate::error::{dim_err, Error, Result};
use crate::grassmann::{OrthoFrame, Projector};
use crate::linalg::{expm_series, qr_positive, sym_eig, Matrix};
use crate::random;
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// A Lagrangian subspace of `ℝ²ⁿ` as a rank-`n` projector.
#[derive(Debug, Clone, PartialEq)]
pub struct LagProjector<T> {
    inner: Projector<T>,
}

fn half_dim(n2: usize) -> Result<usize> {
    if n2 == 0 || n2 % 2 != 0 {
        return dim_err(format!("Lagrangian data needs an even positive dimension, got {n2}"));
    }
    Ok(n2 / 2)
}

/// `‖PJP‖_F`.
pub fn lagrangian_residual<T: Real>(p: &Matrix<T>) -> T {
    let j = Matrix::symplectic_j(p.rows() / 2);
    p.matmul(&j).matmul(p).norm_fro()
}

impl<T: Real> LagProjector<T> {
    pub fn new(p: Matrix<T>) -> Result<Self> {
        let n = half_dim(p.rows())?;
        let inner = Projector::new(p, n)?;
        let residual = lagrangian_residual(inner.matrix()).to_f64_lossy();
        if residual > Tolerances::for_scalar::<T>().projector {
            return Err(Error::NotLagrangian { residual });
        }
        Ok(Self { inner })
    }

    pub(crate) fn from_trusted(inner: Projector<T>) -> Self {
        Self { inner }
    }

    /// `diag(I_n, 0)`.
    pub fn coordinate(n: usize) -> Result<Self> {
        Ok(Self { inner: Projector::coordinate(2 * n, n)? })
    }

    pub fn as_projector(&self) -> &Projector<T> {
        &self.inner
    }

    pub fn into_projector(self) -> Projector<T> {
        self.inner
    }

    pub fn matrix(&self) -> &Matrix<T> {
        self.inner.matrix()
    }

    pub fn half_dim(&self) -> usize {
        self.inner.rank()
    }

    pub fn lagrangian_residual(&self) -> T {
        lagrangian_residual(self.inner.matrix())
    }
}

/// An orthogonal symplectic frame `Θ` (`ΘᵀΘ = I`, `ΘᵀJΘ = J`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticFrame<T> {
    frame: OrthoFrame<T>,
}

/// `‖ΘᵀJΘ − J‖_max`.
pub fn symplecticity_residual<T: Real>(theta: &Matrix<T>) -> T {
    let j = Matrix::symplectic_j(theta.rows() / 2);
    (&theta.tr_matmul(&j).matmul(theta) - &j).max_abs()
}

impl<T: Real> SymplecticFrame<T> {
    pub fn new(theta: Matrix<T>) -> Result<Self> {
        let n = half_dim(theta.rows())?;
        let frame = OrthoFrame::new(theta, n)?;
        let residual = symplecticity_residual(frame.theta()).to_f64_lossy();
        if !(residual <= Tolerances::for_scalar::<T>().orthogonality) {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self { frame })
    }

    pub(crate) fn from_trusted(frame: OrthoFrame<T>) -> Self {
        Self { frame }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self { frame: OrthoFrame::identity(2 * n, n)? })
    }

    /// Frame `Θ` with `Θᵀ = [[U, −V], [V, U]]` for an orthonormal basis
    /// `[[U], [V]]` of a Lagrangian subspace. The basis is orthonormalized
    /// first; it must be Lagrangian for the result to be a frame.
    pub fn from_basis(y: &Matrix<T>) -> Result<Self> {
        let n = half_dim(y.rows())?;
        if y.cols() != n {
            return dim_err(format!("Lagrangian basis must be {}x{n}, got {:?}", 2 * n, y.shape()));
        }
        let q = qr_positive(y)?.q.block(0, 0, 2 * n, n);
        let u = q.block(0, 0, n, n);
        let v = q.block(n, 0, n, n);
        let theta_t = Matrix::from_blocks(&u, &-&v, &v, &u);
        Ok(Self { frame: OrthoFrame::from_trusted(theta_t.transpose(), n) })
    }

    pub fn as_ortho(&self) -> &OrthoFrame<T> {
        &self.frame
    }

    pub fn theta(&self) -> &Matrix<T> {
        self.frame.theta()
    }

    pub fn half_dim(&self) -> usize {
        self.frame.rank()
    }

    pub fn projector(&self) -> LagProjector<T> {
        LagProjector::from_trusted(self.frame.projector())
    }

    pub fn orthogonality_residual(&self) -> T {
        self.frame.orthogonality_residual()
    }

    pub fn symplecticity_residual(&self) -> T {
        symplecticity_residual(self.frame.theta())
    }

    pub(crate) fn check_param(&self, z: &Matrix<T>) -> Result<()> {
        let n = self.half_dim();
        if z.shape() != (n, n) {
            return dim_err(format!("Lagrangian tangent parameter must be {n}x{n}, got {:?}", z.shape()));
        }
        check_symmetric(z)
    }

    /// `ξ = Θᵀ [[0, Z], [Z, 0]] Θ` for symmetric `Z`.
    pub fn tangent(&self, z: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_param(z)?;
        self.frame.tangent(z)
    }

    pub fn tangent_param(&self, xi: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.frame.tangent_param(xi)?.symmetrized())
    }

    /// Rebuilds the frame from its leading rows so that it is orthogonal and
    /// symplectic to working precision again.
    pub fn reorthogonalized(&self) -> Result<Self> {
        Self::from_basis(&self.frame.basis())
    }
}

pub(crate) fn check_symmetric<T: Real>(z: &Matrix<T>) -> Result<()> {
    let tol = Tolerances::for_scalar::<T>().symmetry;
    let residual = z.symmetry_residual();
    if !z.is_square() || residual.to_f64_lossy() > tol * z.max_abs().to_f64_lossy().max(1.0) {
        return Err(Error::NotSymmetric { residual: residual.to_f64_lossy() });
    }
    Ok(())
}

/// `½ [P, [P, JXJ + X]]`, the orthogonal projection onto `T_P LG(n)`.
pub fn lg_tangent_project<T: Real>(p: &LagProjector<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    let n2 = p.matrix().rows();
    if x.shape() != (n2, n2) {
        return dim_err(format!("cannot project {:?} at a point of size {n2}", x.shape()));
    }
    Ok(lg_project_raw(p.matrix(), x))
}

pub(crate) fn lg_project_raw<T: Real>(p: &Matrix<T>, x: &Matrix<T>) -> Matrix<T> {
    let j = Matrix::symplectic_j(p.rows() / 2);
    let sum = &j.matmul(x).matmul(&j) + x;
    crate::grassmann::tangent_project(&Projector::from_trusted(p.clone(), p.rows() / 2), &sum)
        .expect("dimensions checked by caller")
        .scale(T::lit(0.5))
}

/// Seeded random point with frame `Θ = exp([[X, −Y], [Y, X]])`, `X` skew and
/// `Y` symmetric Gaussian.
pub fn random_lag_projector<T: Real>(n: usize, seed: u64) -> Result<(LagProjector<T>, SymplecticFrame<T>)> {
    if n == 0 {
        return dim_err("LG(0) has no points");
    }
    let mut rng = random::rng(seed);
    let x: Matrix<T> = random::skew(&mut rng, n);
    let y: Matrix<T> = random::symmetric(&mut rng, n);
    let frame = frame_from_generator(&x, &y);
    Ok((frame.projector(), frame))
}

/// `Θ = exp([[X, −Y], [Y, X]])` for skew `X` and symmetric `Y`.
pub fn frame_from_generator<T: Real>(x: &Matrix<T>, y: &Matrix<T>) -> SymplecticFrame<T> {
    let g = Matrix::from_blocks(x, &-y, y, x);
    let n = x.rows();
    SymplecticFrame { frame: OrthoFrame::from_trusted(expm_series(&g), n) }
}

/// A symplectic frame for `P` from its eigenvectors.
pub fn frame_from_lag_projector<T: Real>(p: &LagProjector<T>) -> Result<SymplecticFrame<T>> {
    let n = p.half_dim();
    let eig = sym_eig(p.matrix())?;
    SymplecticFrame::from_basis(&eig.vectors.block(0, 0, 2 * n, n))
}
