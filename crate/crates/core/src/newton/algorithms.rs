//! Frame-form Newton steps for the three model costs. Each step transforms
//! the cost matrix into the current frame, solves a matrix equation for the
//! tangent parameter and pushes the frame forward with the QR chart.

use super::{drive, NewtonConfig, NewtonOutcome, StepOutcome};
use crate::costs::{riemannian_gradient_gr, CostFunction, HamiltonianRayleighCost, InvariantSubspaceCost, RayleighCost};
use crate::error::{dim_err, Result};
use crate::grassmann::{ad_squared, ChartId, OrthoFrame, Projector};
use crate::lagrange::{lg_project_raw, SymplecticFrame};
use crate::linalg::{sym_eig, Matrix};
use crate::scalar::Real;
use crate::solvers::{
    solve_invariant_newton_direct, solve_invariant_newton_recursive, solve_lyapunov, solve_sylvester, InvariantBlocks,
};

/// How the invariant-subspace step solves its matrix equation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SolverChoice {
    /// Dense assembly of the vectorized operator and LU.
    #[default]
    Direct,
    /// Alternating Sylvester solves until the relative change drops below `tol`.
    Recursive { max_sweeps: usize, tol: f64 },
}

impl SolverChoice {
    pub fn recursive() -> Self {
        SolverChoice::Recursive { max_sweeps: 200, tol: 1e-13 }
    }
}

fn frame_blocks<T: Real>(a: &Matrix<T>, frame: &OrthoFrame<T>) -> Result<InvariantBlocks<T>> {
    if a.shape() != (frame.dim(), frame.dim()) {
        return dim_err(format!("matrix {:?} for a frame of size {}", a.shape(), frame.dim()));
    }
    InvariantBlocks::split(&frame.to_frame(a), frame.rank())
}

/// Rayleigh quotient on `Gr(m, n)`: `A₁₁Z − ZA₂₂ = A₁₂`, then the QR chart at `Z`.
pub fn algorithm1_step<T: Real>(a: &Matrix<T>, frame: &OrthoFrame<T>) -> Result<StepOutcome<T, OrthoFrame<T>>> {
    let b = frame_blocks(a, frame)?;
    let z = solve_sylvester(&b.a11.symmetrized(), &b.a22.symmetrized(), &b.a12)?;
    Ok(StepOutcome::new(frame.push(ChartId::Qr, &z)?, z))
}

/// Rayleigh quotient on `LG(n)`: `A₁₁Z + ZA₁₁ = A₁₂`, then the symplectic QR chart at `Z`.
pub fn algorithm2_step<T: Real>(
    cost: &HamiltonianRayleighCost<T>,
    frame: &SymplecticFrame<T>,
) -> Result<StepOutcome<T, SymplecticFrame<T>>> {
    let n = frame.half_dim();
    if cost.dim() != 2 * n {
        return dim_err(format!("cost acts on size {}, frame is {}", cost.dim(), 2 * n));
    }
    let k = frame.as_ortho().to_frame(cost.matrix());
    let z = solve_lyapunov(&k.block(0, 0, n, n).symmetrized(), &k.block(0, n, n, n).symmetrized())?;
    Ok(StepOutcome::new(frame.push(ChartId::Qr, &z)?, z))
}

/// Invariant-subspace cost on `Gr(m, n)`: solve the four-term equation for
/// `Z`, then the QR chart at `−Z`.
pub fn algorithm3_step<T: Real>(
    a: &Matrix<T>,
    frame: &OrthoFrame<T>,
    solver: SolverChoice,
) -> Result<StepOutcome<T, OrthoFrame<T>>> {
    let b = frame_blocks(a, frame)?;
    let z = match solver {
        SolverChoice::Direct => solve_invariant_newton_direct(&b)?,
        SolverChoice::Recursive { max_sweeps, tol } => solve_invariant_newton_recursive(&b, max_sweeps, T::lit(tol))?.z,
    };
    let z = -&z;
    Ok(StepOutcome::new(frame.push(ChartId::Qr, &z)?, z))
}

pub fn run_algorithm1<T: Real>(
    cost: &RayleighCost<T>,
    start: OrthoFrame<T>,
    config: &NewtonConfig,
    reference: Option<&Projector<T>>,
) -> Result<NewtonOutcome<OrthoFrame<T>>> {
    let a = cost.matrix();
    drive(
        start,
        config,
        reference,
        1,
        |p| Ok((cost.eval(p.matrix()), ad_squared(p.matrix(), a).norm_fro())),
        |f| algorithm1_step(a, f),
    )
}

pub fn run_algorithm2<T: Real>(
    cost: &HamiltonianRayleighCost<T>,
    start: SymplecticFrame<T>,
    config: &NewtonConfig,
    reference: Option<&Projector<T>>,
) -> Result<NewtonOutcome<SymplecticFrame<T>>> {
    drive(
        start,
        config,
        reference,
        1,
        |p| Ok((cost.eval(p.matrix()), lg_project_raw(p.matrix(), cost.matrix()).norm_fro())),
        |f| algorithm2_step(cost, f),
    )
}

pub fn run_algorithm3<T: Real>(
    cost: &InvariantSubspaceCost<T>,
    start: OrthoFrame<T>,
    config: &NewtonConfig,
    solver: SolverChoice,
    reference: Option<&Projector<T>>,
) -> Result<NewtonOutcome<OrthoFrame<T>>> {
    drive(
        start,
        config,
        reference,
        1,
        |p| Ok((cost.eval(p.matrix()), riemannian_gradient_gr(cost, p)?.norm_fro())),
        |f| algorithm3_step(cost.matrix(), f, solver),
    )
}

/// Spectral projector of symmetric `A` closest to `P`: the eigenvectors `v`
/// of `A` with the `rank(P)` largest weights `vᵀPv`. Returns `None` unless the
/// weights separate clearly (gap above ½), which fails for clustered spectra
/// or iterates far from any critical point.
pub fn rayleigh_limit_reference<T: Real>(a: &Matrix<T>, p: &Projector<T>) -> Result<Option<Projector<T>>> {
    if a.shape() != (p.dim(), p.dim()) {
        return dim_err(format!("matrix {:?} for a projector of size {}", a.shape(), p.dim()));
    }
    let eig = sym_eig(&a.symmetrized())?;
    let n = p.dim();
    let mut weighted: Vec<(T, usize)> = (0..n)
        .map(|i| {
            let v = Matrix::from_fn(n, 1, |r, _| eig.vectors[(r, i)]);
            (v.tr_matmul(&p.matrix().matmul(&v))[(0, 0)], i)
        })
        .collect();
    weighted.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let m = p.rank();
    if weighted[m - 1].0 - weighted[m].0 <= T::lit(0.5) {
        return Ok(None);
    }
    let basis = Matrix::from_fn(n, m, |r, c| eig.vectors[(r, weighted[c].1)]);
    Ok(Some(Projector::from_basis(&basis)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{distance, random_projector};
    use crate::lagrange::random_lag_projector;
    use crate::newton::{newton_step_generic, Status};
    use crate::random;

    type M = Matrix<f64>;

    fn nudge(frame: &OrthoFrame<f64>, size: f64, seed: u64) -> OrthoFrame<f64> {
        let z = random::gaussian::<f64, _>(&mut random::rng(seed), frame.rank(), frame.dim() - frame.rank());
        frame.push(ChartId::Exp, &z.scale(size / z.norm_fro())).unwrap()
    }

    #[test]
    fn algorithm1_fixed_point_and_limit() {
        let a = M::diag(&[4.0, 3.0, 2.0, 1.0]);
        let frame = OrthoFrame::identity(4, 2).unwrap();
        let step = algorithm1_step(&a, &frame).unwrap();
        assert_eq!(step.z.max_abs(), 0.0);
        assert!((step.frame.theta() - frame.theta()).max_abs() < 1e-15);

        let cost = RayleighCost::new(a).unwrap();
        let target = Projector::coordinate(4, 2).unwrap();
        let run = run_algorithm1(&cost, nudge(&frame, 0.1, 1), &NewtonConfig::default(), Some(&target)).unwrap();
        assert_eq!(run.trace.status, Status::Converged);
        assert!((run.frame.projector().matrix() - target.matrix()).max_abs() < 1e-12);
        let found = rayleigh_limit_reference(cost.matrix(), &run.frame.projector()).unwrap().unwrap();
        assert!((found.matrix() - target.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn algorithm1_matches_generic_step() {
        let mut rng = random::rng(11);
        let cost = RayleighCost::new(random::symmetric::<f64, _>(&mut rng, 5)).unwrap();
        let (_, frame) = random_projector::<f64>(5, 2, 12).unwrap();
        let special = algorithm1_step(cost.matrix(), &frame).unwrap();
        let generic = newton_step_generic(&cost, &frame, &NewtonConfig::default()).unwrap();
        assert!((&special.z - &generic.z).max_abs() < 1e-9);
        assert!((special.frame.projector().matrix() - generic.frame.projector().matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn algorithm2_preserves_structure() {
        let (_, theta) = random_lag_projector::<f64>(3, 31).unwrap();
        let d = M::diag(&[1.0, 2.0, 3.5]);
        let h = theta.theta().tr_matmul(&M::from_blocks(&d, &M::zeros(3, 3), &M::zeros(3, 3), &-&d)).matmul(theta.theta());
        let cost = HamiltonianRayleighCost::new(h).unwrap();
        let fixed = algorithm2_step(&cost, &theta).unwrap();
        assert!(fixed.z.max_abs() < 1e-13);

        let z = random::symmetric::<f64, _>(&mut random::rng(32), 3);
        let start = theta.push(ChartId::Exp, &z.scale(0.05 / z.norm_fro())).unwrap();
        let target = theta.projector().into_projector();
        let config = NewtonConfig { max_iters: 10, grad_tol: 1e-300, step_tol: 1e-300, ..Default::default() };
        let run = run_algorithm2(&cost, start, &config, Some(&target)).unwrap();
        assert_eq!(run.trace.records.len(), 11);
        assert!(run.trace.records.iter().all(|r| r.frame_residual < 1e-9));
        assert!(run.trace.last().distance.unwrap() < 1e-12);
    }

    #[test]
    fn algorithm3_symmetric_diagonal() {
        let a = M::diag(&[1.0, 2.0, 5.0]);
        let cost = InvariantSubspaceCost::new(a.clone()).unwrap();
        let start = nudge(&OrthoFrame::identity(3, 1).unwrap(), 0.05, 41);
        let run = run_algorithm3(&cost, start, &NewtonConfig::default(), SolverChoice::Direct, None).unwrap();
        assert_eq!(run.trace.status, Status::Converged);
        let p = run.frame.projector();
        assert!(cost.invariance_residual(p.matrix()) <= 1e-10);
        assert!((p.matrix() - &M::coordinate_projector(3, 1)).max_abs() < 1e-10);
    }

    #[test]
    fn algorithm3_block_triangular_is_fixed() {
        let a = M::from_rows(&[
            vec![3.0, 1.0, 2.0, 0.5],
            vec![0.0, 4.0, -1.0, 1.0],
            vec![0.0, 0.0, 1.0, 2.0],
            vec![0.0, 0.0, 0.0, -1.0],
        ])
        .unwrap();
        let frame = OrthoFrame::identity(4, 2).unwrap();
        for solver in [SolverChoice::Direct, SolverChoice::recursive()] {
            let step = algorithm3_step(&a, &frame, solver).unwrap();
            assert_eq!(step.z.max_abs(), 0.0);
        }
    }

    #[test]
    fn algorithm3_recursive_matches_direct() {
        let mut rng = random::rng(51);
        let s = &M::identity(5) + &random::gaussian::<f64, _>(&mut rng, 5, 5).scale(0.2);
        let core = M::from_rows(&[
            vec![5.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 4.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.5, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.3],
            vec![0.0, 0.0, 0.0, 0.0, -1.0],
        ])
        .unwrap();
        let s_inv = crate::linalg::Lu::factor(&s, 1e-12).unwrap().inverse();
        let a = s.matmul(&core).matmul(&s_inv);
        let target = Projector::from_basis(&s.block(0, 0, 5, 2)).unwrap();
        let start = nudge(&crate::grassmann::frame_from_projector(&target).unwrap(), 0.05, 52);
        let cost = InvariantSubspaceCost::new(a).unwrap();
        let config = NewtonConfig::default();
        let direct = run_algorithm3(&cost, start.clone(), &config, SolverChoice::Direct, Some(&target)).unwrap();
        let recursive = run_algorithm3(&cost, start, &config, SolverChoice::recursive(), Some(&target)).unwrap();
        assert_eq!(direct.trace.status, Status::Converged);
        assert_eq!(recursive.trace.status, Status::Converged);
        let (pd, pr) = (direct.frame.projector(), recursive.frame.projector());
        assert!(distance(&pd, &pr).unwrap() < 1e-6);
        assert!(distance(&pd, &target).unwrap() < 1e-8);
    }

    #[test]
    fn identity_matrix_is_degenerate() {
        let cost = InvariantSubspaceCost::new(M::identity(4)).unwrap();
        let frame = OrthoFrame::identity(4, 2).unwrap();
        assert!(algorithm3_step(cost.matrix(), &frame, SolverChoice::Direct).is_err());
        // the gradient vanishes everywhere but the critical point is degenerate
        let run = run_algorithm3(&cost, frame, &NewtonConfig::default(), SolverChoice::Direct, None).unwrap();
        assert_eq!(run.trace.status, Status::SingularHessian);
        assert_eq!(run.trace.steps(), 0);
    }

    #[test]
    fn clustered_spectrum_has_no_reference() {
        let p = Projector::coordinate(3, 1).unwrap();
        let found = rayleigh_limit_reference(&M::identity(3), &p).unwrap();
        // with A = I any orthonormal basis diagonalizes; Jacobi returns e_i, which does separate
        assert!(found.is_some());
        let tilted = Projector::from_basis(&M::from_rows(&[vec![1.0], vec![1.0], vec![0.0]]).unwrap()).unwrap();
        assert!(rayleigh_limit_reference(&M::diag(&[3.0, 2.0, 1.0]), &tilted).unwrap().is_none());
    }
}
