//! Newton step in tangent coordinates for an arbitrary cost.
//!
//! Every chart has identity derivative and the same second derivative at the
//! origin, so the pulled-back gradient and Hessian of `f ∘ μ` at 0 are the
//! Riemannian gradient and Hessian read off in the coordinate basis for all
//! three choices of `μ`. Only `ν` changes the iterates.

use super::{drive, NewtonConfig, NewtonOutcome, StepOutcome};
use crate::costs::{hessian_gr_raw, hessian_lg_raw, CostFunction};
use crate::error::{dim_err, Result};
use crate::grassmann::{ad_squared, OrthoFrame, Projector};
use crate::lagrange::{lg_project_raw, SymplecticFrame};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::solvers::solve_dense;

fn check_cost_dim<T: Real, C: CostFunction<T> + ?Sized>(cost: &C, n: usize) -> Result<()> {
    if cost.dim() != n {
        return dim_err(format!("cost acts on {}x{} matrices, frame is {n}x{n}", cost.dim(), cost.dim()));
    }
    Ok(())
}

/// Coordinate gradient `gᵢ = ⟨grad, ξᵢ⟩` and Hessian `Hᵢⱼ = ⟨Hess ξⱼ, ξᵢ⟩` for
/// tangent vectors `ξᵢ` built from unit parameters.
fn assemble<T: Real>(
    grad: &Matrix<T>,
    basis: &[Matrix<T>],
    hess: impl Fn(&Matrix<T>) -> Matrix<T>,
) -> (Vec<T>, Matrix<T>) {
    let d = basis.len();
    let g = basis.iter().map(|xi| grad.inner(xi)).collect();
    let images: Vec<_> = basis.iter().map(hess).collect();
    let mut h = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] = images[j].inner(&basis[i]);
        }
    }
    (g, h.symmetrized())
}

/// Unit parameters `E_kl` of `Gr(m, n)`, row-major over the `m×(n−m)` block.
fn gr_params<T: Real>(m: usize, k: usize) -> Vec<Matrix<T>> {
    (0..m * k)
        .map(|i| {
            let mut e = Matrix::zeros(m, k);
            e[(i / k, i % k)] = T::one();
            e
        })
        .collect()
}

/// Symmetric unit parameters `S_kl`, `k ≤ l`, of `LG(n)`.
fn lg_params<T: Real>(n: usize) -> Vec<Matrix<T>> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for k in 0..n {
        for l in k..n {
            let mut s = Matrix::zeros(n, n);
            s[(k, l)] = T::one();
            s[(l, k)] = T::one();
            out.push(s);
        }
    }
    out
}

/// Coordinate gradient and Hessian of `cost` at the frame's projector on `Gr(m, n)`.
pub fn newton_system<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    frame: &OrthoFrame<T>,
) -> Result<(Vec<T>, Matrix<T>)> {
    check_cost_dim(cost, frame.dim())?;
    let p = frame.projector();
    let pm = p.matrix();
    let ambient = cost.ambient_gradient(pm);
    let grad = ad_squared(pm, &ambient);
    let basis = gr_params(frame.rank(), frame.dim() - frame.rank())
        .iter()
        .map(|e| frame.tangent(e))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(&grad, &basis, |xi| hessian_gr_raw(cost, pm, &ambient, xi)))
}

/// Coordinate gradient and Hessian on `LG(n)`.
pub fn lg_newton_system<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    frame: &SymplecticFrame<T>,
) -> Result<(Vec<T>, Matrix<T>)> {
    check_cost_dim(cost, 2 * frame.half_dim())?;
    let p = frame.projector();
    let pm = p.matrix();
    let ambient = cost.ambient_gradient(pm);
    let grad = lg_project_raw(pm, &ambient);
    let basis = lg_params(frame.half_dim()).iter().map(|s| frame.tangent(s)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(&grad, &basis, |xi| hessian_lg_raw(cost, pm, &ambient, xi)))
}

fn newton_coordinates<T: Real>(g: &[T], h: &Matrix<T>) -> Result<Vec<T>> {
    let neg: Vec<T> = g.iter().map(|&v| -v).collect();
    solve_dense(h, &neg)
}

/// One step on `Gr(m, n)`: solve `Hz = −g` and push `Z(z)` forward with `ν`.
pub fn newton_step_generic<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    frame: &OrthoFrame<T>,
    config: &NewtonConfig,
) -> Result<StepOutcome<T, OrthoFrame<T>>> {
    let (g, h) = newton_system(cost, frame)?;
    let z = newton_coordinates(&g, &h)?;
    let (m, k) = (frame.rank(), frame.dim() - frame.rank());
    let z = Matrix::from_fn(m, k, |i, j| z[i * k + j]);
    Ok(StepOutcome::new(frame.push(config.nu, &z)?, z))
}

/// One step on `LG(n)` in the symmetric coordinates `S_kl`.
pub fn newton_step_generic_lg<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    frame: &SymplecticFrame<T>,
    config: &NewtonConfig,
) -> Result<StepOutcome<T, SymplecticFrame<T>>> {
    let (g, h) = lg_newton_system(cost, frame)?;
    let coords = newton_coordinates(&g, &h)?;
    let n = frame.half_dim();
    let mut z = Matrix::zeros(n, n);
    let mut it = coords.into_iter();
    for k in 0..n {
        for l in k..n {
            let v = it.next().expect("one coordinate per basis element");
            z[(k, l)] = v;
            z[(l, k)] = v;
        }
    }
    Ok(StepOutcome::new(frame.push(config.nu, &z)?, z))
}

pub fn run_newton<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    start: OrthoFrame<T>,
    config: &NewtonConfig,
    reference: Option<&Projector<T>>,
) -> Result<NewtonOutcome<OrthoFrame<T>>> {
    check_cost_dim(cost, start.dim())?;
    drive(
        start,
        config,
        reference,
        config.reorthogonalize_every,
        |p| Ok((cost.eval(p.matrix()), ad_squared(p.matrix(), &cost.ambient_gradient(p.matrix())).norm_fro())),
        |f| newton_step_generic(cost, f, config),
    )
}

pub fn run_newton_lg<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    start: SymplecticFrame<T>,
    config: &NewtonConfig,
    reference: Option<&Projector<T>>,
) -> Result<NewtonOutcome<SymplecticFrame<T>>> {
    check_cost_dim(cost, 2 * start.half_dim())?;
    drive(
        start,
        config,
        reference,
        config.reorthogonalize_every,
        |p| Ok((cost.eval(p.matrix()), lg_project_raw(p.matrix(), &cost.ambient_gradient(p.matrix())).norm_fro())),
        |f| newton_step_generic_lg(cost, f, config),
    )
}
