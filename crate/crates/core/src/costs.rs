//! Smooth functions on `Sym_n` restricted to `Gr(m, n)` or `LG(n)`.
//!
//! A cost provides its value, its Euclidean gradient `∇F(P)` and the action
//! of its Euclidean Hessian on symmetric matrices. The Riemannian gradient and
//! Hessian on either manifold are assembled from those three pieces.

use crate::error::{dim_err, Error, Result};
use crate::grassmann::{ad_squared, Projector};
use crate::lagrange::{lg_project_raw, LagProjector};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::tolerances::Tolerances;

pub trait CostFunction<T: Real> {
    /// Size `n` of the symmetric matrices the cost acts on.
    fn dim(&self) -> usize;

    fn eval(&self, p: &Matrix<T>) -> T;

    /// Euclidean gradient `∇F(P) ∈ Sym_n`.
    fn ambient_gradient(&self, p: &Matrix<T>) -> Matrix<T>;

    /// Euclidean Hessian `Hess_F(P)(ξ)` for symmetric `ξ`.
    fn ambient_hessian_apply(&self, p: &Matrix<T>, xi: &Matrix<T>) -> Matrix<T>;
}

fn check_symmetric_input<T: Real>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return dim_err(format!("expected a square matrix, got {:?}", a.shape()));
    }
    let residual = a.symmetry_residual().to_f64_lossy();
    if residual > Tolerances::for_scalar::<T>().symmetry * a.max_abs().to_f64_lossy().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(())
}

/// `f(P) = tr(AP)` for symmetric `A`.
#[derive(Debug, Clone)]
pub struct RayleighCost<T> {
    a: Matrix<T>,
}

impl<T: Real> RayleighCost<T> {
    pub fn new(a: Matrix<T>) -> Result<Self> {
        check_symmetric_input(&a)?;
        Ok(Self { a: a.symmetrized() })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }
}

impl<T: Real> CostFunction<T> for RayleighCost<T> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn eval(&self, p: &Matrix<T>) -> T {
        self.a.inner(p)
    }

    fn ambient_gradient(&self, _p: &Matrix<T>) -> Matrix<T> {
        self.a.clone()
    }

    fn ambient_hessian_apply(&self, p: &Matrix<T>, _xi: &Matrix<T>) -> Matrix<T> {
        Matrix::zeros(p.rows(), p.cols())
    }
}

/// `f(P) = ‖(I − P)AP‖² = tr((I − P)APAᵀ)` for arbitrary square `A`.
#[derive(Debug, Clone)]
pub struct InvariantSubspaceCost<T> {
    a: Matrix<T>,
}

impl<T: Real> InvariantSubspaceCost<T> {
    pub fn new(a: Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return dim_err(format!("expected a square matrix, got {:?}", a.shape()));
        }
        if !a.is_finite() {
            return Err(Error::InvalidConfig("matrix has non-finite entries".into()));
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    /// `‖(I − P)AP‖_F`.
    pub fn invariance_residual(&self, p: &Matrix<T>) -> T {
        let ap = self.a.matmul(p);
        (&ap - &p.matmul(&ap)).norm_fro()
    }
}

impl<T: Real> CostFunction<T> for InvariantSubspaceCost<T> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `tr((I − P)APAᵀ)`, which equals `‖(I − P)AP‖²` on projectors and is
    /// the extension the gradient and Hessian refer to.
    fn eval(&self, p: &Matrix<T>) -> T {
        let ap = self.a.matmul(p);
        (&ap - &p.matmul(&ap)).inner(&self.a)
    }

    fn ambient_gradient(&self, p: &Matrix<T>) -> Matrix<T> {
        invariant_cost_gradient(&self.a, p)
    }

    fn ambient_hessian_apply(&self, _p: &Matrix<T>, xi: &Matrix<T>) -> Matrix<T> {
        invariant_cost_hessian_apply(&self.a, xi)
    }
}

/// `∇F(P) = Aᵀ(I − P)A − APAᵀ`.
pub fn invariant_cost_gradient<T: Real>(a: &Matrix<T>, p: &Matrix<T>) -> Matrix<T> {
    let ata = a.tr_matmul(a);
    let atpa = a.tr_matmul(&p.matmul(a));
    let apat = a.matmul(p).matmul_tr(a);
    (&(&ata - &atpa) - &apat).symmetrized()
}

/// `Hess_F(P)(ξ) = −AᵀξA − AξAᵀ`.
pub fn invariant_cost_hessian_apply<T: Real>(a: &Matrix<T>, xi: &Matrix<T>) -> Matrix<T> {
    let s = &a.tr_matmul(&xi.matmul(a)) + &a.matmul(xi).matmul_tr(a);
    (-s).symmetrized()
}

/// Ambient derivatives of the invariant-subspace cost at `P`: the gradient
/// and the Hessian as an operator.
pub fn invariant_cost_ambient<'a, T: Real>(
    a: &'a Matrix<T>,
    p: &Matrix<T>,
) -> Result<(Matrix<T>, impl Fn(&Matrix<T>) -> Matrix<T> + 'a)> {
    if !a.is_square() || p.shape() != a.shape() {
        return dim_err(format!("A is {:?} and P is {:?}", a.shape(), p.shape()));
    }
    Ok((invariant_cost_gradient(a, p), move |xi: &Matrix<T>| invariant_cost_hessian_apply(a, xi)))
}

/// `f(P) = tr(HP)` on `LG(n)` for a symmetric `H` with `JHJ = H`, that is
/// `H = [[S, T], [T, −S]]` with `S`, `T` symmetric.
#[derive(Debug, Clone)]
pub struct HamiltonianRayleighCost<T> {
    h: Matrix<T>,
}

impl<T: Real> HamiltonianRayleighCost<T> {
    pub fn new(h: Matrix<T>) -> Result<Self> {
        check_symmetric_input(&h)?;
        if h.rows() % 2 != 0 {
            return dim_err(format!("Hamiltonian matrix must have even size, got {}", h.rows()));
        }
        let residual = hamiltonian_structure_residual(&h).to_f64_lossy();
        if residual > Tolerances::for_scalar::<T>().projector * h.max_abs().to_f64_lossy().max(1.0) {
            return Err(Error::InvalidConfig(format!("‖JHJ − H‖ = {residual:e}: matrix lacks the Hamiltonian block structure")));
        }
        Ok(Self { h: h.symmetrized() })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.h
    }
}

/// `‖JHJ − H‖_max`.
pub fn hamiltonian_structure_residual<T: Real>(h: &Matrix<T>) -> T {
    let j = Matrix::symplectic_j(h.rows() / 2);
    (&j.matmul(h).matmul(&j) - h).max_abs()
}

impl<T: Real> CostFunction<T> for HamiltonianRayleighCost<T> {
    fn dim(&self) -> usize {
        self.h.rows()
    }

    fn eval(&self, p: &Matrix<T>) -> T {
        self.h.inner(p)
    }

    fn ambient_gradient(&self, _p: &Matrix<T>) -> Matrix<T> {
        self.h.clone()
    }

    fn ambient_hessian_apply(&self, p: &Matrix<T>, _xi: &Matrix<T>) -> Matrix<T> {
        Matrix::zeros(p.rows(), p.cols())
    }
}

fn check_dims<T: Real, C: CostFunction<T> + ?Sized>(cost: &C, p: &Matrix<T>, xi: Option<&Matrix<T>>) -> Result<()> {
    let n = cost.dim();
    if p.shape() != (n, n) || xi.is_some_and(|x| x.shape() != (n, n)) {
        return dim_err(format!("cost acts on {n}x{n} matrices, point is {:?}", p.shape()));
    }
    Ok(())
}

/// `[P, [P, ∇F(P)]]`.
pub fn riemannian_gradient_gr<T: Real, C: CostFunction<T> + ?Sized>(cost: &C, p: &Projector<T>) -> Result<Matrix<T>> {
    check_dims(cost, p.matrix(), None)?;
    Ok(ad_squared(p.matrix(), &cost.ambient_gradient(p.matrix())))
}

/// `[P, [P, Hess_F(P)(ξ)]] − [P, [∇F(P), ξ]]`.
pub fn riemannian_hessian_apply_gr<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    p: &Projector<T>,
    xi: &Matrix<T>,
) -> Result<Matrix<T>> {
    let pm = p.matrix();
    check_dims(cost, pm, Some(xi))?;
    Ok(hessian_gr_raw(cost, pm, &cost.ambient_gradient(pm), xi))
}

pub(crate) fn hessian_gr_raw<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    p: &Matrix<T>,
    grad: &Matrix<T>,
    xi: &Matrix<T>,
) -> Matrix<T> {
    let first = ad_squared(p, &cost.ambient_hessian_apply(p, xi));
    let second = p.commutator(&grad.commutator(xi));
    (&first - &second).symmetrized()
}

/// `π(∇F(P))` with `π(X) = ½[P, [P, JXJ + X]]`.
pub fn riemannian_gradient_lg<T: Real, C: CostFunction<T> + ?Sized>(cost: &C, p: &LagProjector<T>) -> Result<Matrix<T>> {
    check_dims(cost, p.matrix(), None)?;
    Ok(lg_project_raw(p.matrix(), &cost.ambient_gradient(p.matrix())))
}

/// `π(Hess_F(P)(ξ)) − π([P, [∇F(P), ξ]])`.
pub fn riemannian_hessian_apply_lg<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    p: &LagProjector<T>,
    xi: &Matrix<T>,
) -> Result<Matrix<T>> {
    let pm = p.matrix();
    check_dims(cost, pm, Some(xi))?;
    Ok(hessian_lg_raw(cost, pm, &cost.ambient_gradient(pm), xi))
}

pub(crate) fn hessian_lg_raw<T: Real, C: CostFunction<T> + ?Sized>(
    cost: &C,
    p: &Matrix<T>,
    grad: &Matrix<T>,
    xi: &Matrix<T>,
) -> Matrix<T> {
    let first = lg_project_raw(p, &cost.ambient_hessian_apply(p, xi));
    let second = lg_project_raw(p, &p.commutator(&grad.commutator(xi)));
    (&first - &second).symmetrized()
}
