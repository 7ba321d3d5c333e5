use super::{chart_exp, frame_from_projector, OrthoFrame, Projector};
use crate::error::{dim_err, Result};
use crate::linalg::{sym_eig, Matrix};
use crate::scalar::Real;

fn check_same_manifold<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<()> {
    if p.dim() != q.dim() || p.rank() != q.rank() {
        return dim_err(format!(
            "points of Gr({}, {}) and Gr({}, {})",
            p.rank(),
            p.dim(),
            q.rank(),
            q.dim()
        ));
    }
    Ok(())
}

fn from_angles<T: Real>(angles: &[T]) -> T {
    let s: T = angles.iter().map(|&a| a * a).sum();
    (T::lit(2.0) * s).sqrt()
}

/// Principal angles between the subspace of `frame` and that of `q`, in
/// ascending order.
///
/// With `ΘQΘᵀ = [[Q₁₁, Q₁₂], [Q₂₁, Q₂₂]]` and `Q₁₁ u = λ u`, the angle is
/// `½ atan2(2‖Q₂₁u‖, 2λ − 1)`. Both arguments carry first-order information,
/// so small angles keep full relative accuracy, unlike `arccos √λ`.
pub fn principal_angles_in_frame<T: Real>(frame: &OrthoFrame<T>, q: &Projector<T>) -> Result<Vec<T>> {
    let (n, m) = (frame.dim(), frame.rank());
    if q.dim() != n || q.rank() != m {
        return dim_err("frame and projector live on different Grassmannians");
    }
    let qf = frame.to_frame(q.matrix()).symmetrized();
    let eig = sym_eig(&qf.block(0, 0, m, m))?;
    let q21 = qf.block(m, 0, n - m, m);
    let two = T::lit(2.0);
    let mut angles: Vec<T> = (0..m)
        .map(|i| {
            let u = eig.vectors.column(i);
            let s = q21.mat_vec(&u).iter().map(|&v| v * v).sum::<T>().sqrt();
            let lam = eig.values[i].max(T::zero()).min(T::one());
            T::lit(0.5) * (two * s).atan2(two * lam - T::one())
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(angles)
}

pub fn principal_angles<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<Vec<T>> {
    check_same_manifold(p, q)?;
    principal_angles_in_frame(&frame_from_projector(p)?, q)
}

/// Geodesic distance `√2 · ‖θ‖₂` over the principal angles `θ`.
pub fn distance<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<T> {
    Ok(from_angles(&principal_angles(p, q)?))
}

/// [`distance`] reusing a frame of the first point.
pub fn distance_in_frame<T: Real>(frame: &OrthoFrame<T>, q: &Projector<T>) -> Result<T> {
    Ok(from_angles(&principal_angles_in_frame(frame, q)?))
}

fn frame_blocks<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<Matrix<T>> {
    check_same_manifold(p, q)?;
    Ok(frame_from_projector(p)?.to_frame(q.matrix()).symmetrized())
}

/// `√(2 Σ arccos²√λᵢ)` over the eigenvalues of `Q₁₁`, clamped to `[0, 1]`.
pub fn distance_from_overlap<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<T> {
    let m = p.rank();
    let eig = sym_eig(&frame_blocks(p, q)?.block(0, 0, m, m))?;
    let angles: Vec<T> = eig.values.iter().map(|&l| l.max(T::zero()).min(T::one()).sqrt().acos()).collect();
    Ok(from_angles(&angles))
}

/// `√(2 Σ arcsin²√μᵢ)` over the eigenvalues of `Q₂₂`, clamped to `[0, 1]`.
pub fn distance_from_complement<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<T> {
    let (n, m) = (p.dim(), p.rank());
    let eig = sym_eig(&frame_blocks(p, q)?.block(m, m, n - m, n - m))?;
    let angles: Vec<T> = eig.values.iter().map(|&l| l.max(T::zero()).min(T::one()).sqrt().asin()).collect();
    Ok(from_angles(&angles))
}

/// The eigenvalue formula on the smaller diagonal block: `Q₁₁` when
/// `2m ≤ n`, `Q₂₂` otherwise.
pub fn distance_by_eigenvalues<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<T> {
    if 2 * p.rank() <= p.dim() {
        distance_from_overlap(p, q)
    } else {
        distance_from_complement(p, q)
    }
}

/// `tr arccos²((YᵀPY)^{1/2})` for an orthonormal basis `Y` of the second
/// point, which equals half the squared distance.
pub fn half_squared_distance_from_basis<T: Real>(p: &Projector<T>, y: &Matrix<T>) -> Result<T> {
    if y.rows() != p.dim() || y.cols() != p.rank() {
        return dim_err(format!("basis {:?} for a point of Gr({}, {})", y.shape(), p.rank(), p.dim()));
    }
    let eig = sym_eig(&y.tr_matmul(&p.matrix().matmul(y)))?;
    Ok(eig
        .values
        .iter()
        .map(|&l| {
            let a = l.max(T::zero()).min(T::one()).sqrt().acos();
            a * a
        })
        .sum())
}

/// Geodesic `e^{t[ξ,P]} P e^{−t[ξ,P]}` through `p0` with velocity `xi0`.
pub fn geodesic<T: Real>(p0: &Projector<T>, xi0: &Matrix<T>, t: T) -> Result<Projector<T>> {
    let frame = frame_from_projector(p0)?;
    let z = frame.tangent_param(xi0)?;
    chart_exp(&frame, &z.scale(t))
}
