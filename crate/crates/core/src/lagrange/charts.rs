//! Charts on `LG(n)`. For symmetric `Z` the generator is
//! `Ω = [[0, −Z], [Z, 0]]` and every chart rotation has the form
//! `[[C, −S], [S, C]]` with commuting symmetric blocks, hence is orthogonal
//! and symplectic.

use super::{LagProjector, SymplecticFrame};
use crate::error::Result;
use crate::grassmann::{ChartId, OrthoFrame, Projector};
use crate::linalg::{cayley, cholesky_upper, spd_inverse, sym_eig, upper_triangular_inverse, Matrix};
use crate::scalar::Real;

fn rotation_from_blocks<T: Real>(c: &Matrix<T>, s: &Matrix<T>) -> Matrix<T> {
    Matrix::from_blocks(c, &-s, s, c)
}

/// Q-factor `[[R⁻¹, −Z R⁻¹], [Z R⁻¹, R⁻¹]]` of `[[I, −Z], [Z, I]]`, where
/// `RᵀR = I + Z²`.
pub fn lg_qr_factor<T: Real>(z: &Matrix<T>) -> Result<Matrix<T>> {
    let n = z.rows();
    let r = cholesky_upper(&(&Matrix::identity(n) + &z.matmul(z)).symmetrized())?;
    let ri = upper_triangular_inverse(&r)?;
    Ok(rotation_from_blocks(&ri, &z.matmul(&ri)))
}

pub fn lg_chart_rotation<T: Real>(chart: ChartId, z: &Matrix<T>) -> Result<Matrix<T>> {
    super::check_symmetric(z)?;
    match chart {
        ChartId::Exp => {
            let eig = sym_eig(&z.symmetrized())?;
            Ok(rotation_from_blocks(&eig.apply(T::cos), &eig.apply(T::sin)))
        }
        ChartId::Qr => lg_qr_factor(z),
        ChartId::Cayley => {
            let n = z.rows();
            let z2 = z.matmul(z).scale(T::lit(0.25));
            let a_inv = spd_inverse(&(&Matrix::identity(n) + &z2).symmetrized())?;
            let c = (&Matrix::identity(n) - &z2).matmul(&a_inv);
            Ok(rotation_from_blocks(&c, &z.matmul(&a_inv)))
        }
    }
}

impl<T: Real> SymplecticFrame<T> {
    pub fn push(&self, chart: ChartId, z: &Matrix<T>) -> Result<Self> {
        self.check_param(z)?;
        Ok(Self::from_trusted(self.as_ortho().rotated(&lg_chart_rotation(chart, z)?)))
    }
}

pub fn lg_chart<T: Real>(frame: &SymplecticFrame<T>, chart: ChartId, z: &Matrix<T>) -> Result<LagProjector<T>> {
    Ok(frame.push(chart, z)?.projector())
}

/// `Θᵀ [[cos Z], [sin Z]] [cos Z, sin Z] Θ`.
pub fn lg_chart_exp<T: Real>(frame: &SymplecticFrame<T>, z: &Matrix<T>) -> Result<LagProjector<T>> {
    lg_chart(frame, ChartId::Exp, z)
}

pub fn lg_chart_qr<T: Real>(frame: &SymplecticFrame<T>, z: &Matrix<T>) -> Result<LagProjector<T>> {
    lg_chart(frame, ChartId::Qr, z)
}

pub fn lg_chart_cayley<T: Real>(frame: &SymplecticFrame<T>, z: &Matrix<T>) -> Result<LagProjector<T>> {
    lg_chart(frame, ChartId::Cayley, z)
}

/// `Cay([ξ,P]) P Cay(−[ξ,P])` on ambient `2n×2n` matrices.
pub fn lg_chart_cayley_direct<T: Real>(frame: &SymplecticFrame<T>, z: &Matrix<T>) -> Result<LagProjector<T>> {
    frame.check_param(z)?;
    let ortho: &OrthoFrame<T> = frame.as_ortho();
    let omega = ortho.from_frame(&crate::grassmann::generator(z));
    let fwd = cayley(&omega)?;
    let back = cayley(&-&omega)?;
    let p = ortho.projector();
    let q = fwd.matmul(p.matrix()).matmul(&back).symmetrized();
    Ok(LagProjector::from_trusted(Projector::from_trusted(q, frame.half_dim())))
}
