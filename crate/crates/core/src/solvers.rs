//! Linear matrix equations behind the Newton steps.

use crate::error::{dim_err, Error, Result};
use crate::linalg::{sym_eig, Lu, Matrix, SymEig};
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// Separation of the spectra that decides solvability of a Sylvester-type
/// equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGapReport {
    /// Smallest `|λᵢ − μⱼ|` (Sylvester), `|λᵢ + λⱼ|` (Lyapunov) or smallest
    /// singular value of the vectorized operator (general case).
    pub min_gap: f64,
    /// Threshold the gap was compared against (`gap_tol · scale`).
    pub threshold: f64,
    pub solvable: bool,
}

impl SpectralGapReport {
    fn new(min_gap: f64, threshold: f64) -> Self {
        Self { min_gap, threshold, solvable: min_gap > threshold }
    }

    fn into_result(self) -> Result<Self> {
        if self.solvable {
            Ok(self)
        } else {
            Err(Error::SpectralOverlap { min_gap: self.min_gap, threshold: self.threshold })
        }
    }
}

fn block_scale<T: Real>(blocks: &[&Matrix<T>]) -> f64 {
    blocks.iter().map(|b| b.norm_fro().to_f64_lossy()).fold(0.0, f64::max)
}

fn check_square<T: Real>(name: &str, a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return dim_err(format!("{name} must be square, got {:?}", a.shape()));
    }
    Ok(())
}

/// Spectral gap between symmetric `A₁₁` and `A₂₂`.
pub fn sylvester_gap<T: Real>(a11: &Matrix<T>, a22: &Matrix<T>) -> Result<SpectralGapReport> {
    let (e1, e2) = (sym_eig(a11)?, sym_eig(a22)?);
    Ok(gap_from_spectra(&e1, &e2, Tolerances::for_scalar::<T>().spectral_gap * block_scale(&[a11, a22]), false))
}

fn gap_from_spectra<T: Real>(e1: &SymEig<T>, e2: &SymEig<T>, threshold: f64, sum: bool) -> SpectralGapReport {
    let mut min_gap = f64::INFINITY;
    for &l in &e1.values {
        for &mu in &e2.values {
            let g = if sum { l + mu } else { l - mu };
            min_gap = min_gap.min(g.abs().to_f64_lossy());
        }
    }
    SpectralGapReport::new(min_gap, threshold)
}

/// Solves `A₁₁Z − ZA₂₂ = C` for symmetric `A₁₁` (m×m) and `A₂₂` (k×k) by
/// diagonalizing both: `Z = U [(UᵀCV)ᵢⱼ / (λᵢ − μⱼ)] Vᵀ`.
pub fn solve_sylvester<T: Real>(a11: &Matrix<T>, a22: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>> {
    solve_sylvester_with(a11, a22, c, Tolerances::for_scalar::<T>().spectral_gap)
}

pub fn solve_sylvester_with<T: Real>(a11: &Matrix<T>, a22: &Matrix<T>, c: &Matrix<T>, gap_tol: f64) -> Result<Matrix<T>> {
    check_square("A11", a11)?;
    check_square("A22", a22)?;
    if c.shape() != (a11.rows(), a22.rows()) {
        return dim_err(format!("right side {:?} for blocks {} and {}", c.shape(), a11.rows(), a22.rows()));
    }
    let (e1, e2) = (sym_eig(a11)?, sym_eig(a22)?);
    gap_from_spectra(&e1, &e2, gap_tol * block_scale(&[a11, a22]), false).into_result()?;
    let ct = e1.vectors.tr_matmul(c).matmul(&e2.vectors);
    let zt = Matrix::from_fn(ct.rows(), ct.cols(), |i, j| ct[(i, j)] / (e1.values[i] - e2.values[j]));
    Ok(e1.vectors.matmul(&zt).matmul_tr(&e2.vectors))
}

/// Solves `AZ + ZA = C` for symmetric `A` and `C`; the solution is symmetric.
pub fn solve_lyapunov<T: Real>(a: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>> {
    check_square("A11", a)?;
    if c.shape() != a.shape() {
        return dim_err(format!("right side {:?} for coefficient {:?}", c.shape(), a.shape()));
    }
    let e = sym_eig(a)?;
    let threshold = Tolerances::for_scalar::<T>().spectral_gap * block_scale(&[a]);
    gap_from_spectra(&e, &e, threshold, true).into_result()?;
    let ct = e.vectors.tr_matmul(c).matmul(&e.vectors);
    let zt = Matrix::from_fn(ct.rows(), ct.cols(), |i, j| ct[(i, j)] / (e.values[i] + e.values[j]));
    Ok(e.vectors.matmul(&zt).matmul_tr(&e.vectors).symmetrized())
}

/// Factored operator `X ↦ AX − XB` for arbitrary square `A`, `B`, assembled
/// as `I ⊗ A − Bᵀ ⊗ I` on column-major vectorizations.
#[derive(Debug, Clone)]
pub struct GeneralSylvester<T> {
    rows: usize,
    cols: usize,
    lu: Lu<T>,
    report: SpectralGapReport,
}

impl<T: Real> GeneralSylvester<T> {
    pub fn new(a: &Matrix<T>, b: &Matrix<T>) -> Result<Self> {
        check_square("A", a)?;
        check_square("B", b)?;
        let (m, k) = (a.rows(), b.rows());
        let d = m * k;
        let mut op = Matrix::zeros(d, d);
        for l in 0..k {
            for i in 0..m {
                for j in 0..m {
                    op[(l * m + i, l * m + j)] = a[(i, j)];
                }
            }
            for l2 in 0..k {
                let bv = b[(l2, l)];
                if bv != T::zero() {
                    for i in 0..m {
                        op[(l * m + i, l2 * m + i)] = op[(l * m + i, l2 * m + i)] - bv;
                    }
                }
            }
        }
        let threshold = Tolerances::for_scalar::<T>().spectral_gap * block_scale(&[a, b]);
        let lu = match Lu::factor(&op, 0.0) {
            Ok(lu) => lu,
            Err(_) => return Err(Error::SpectralOverlap { min_gap: 0.0, threshold }),
        };
        let report = SpectralGapReport::new(smallest_singular_value(&lu)?, threshold).into_result()?;
        Ok(Self { rows: m, cols: k, lu, report })
    }

    pub fn report(&self) -> SpectralGapReport {
        self.report
    }

    pub fn solve(&self, c: &Matrix<T>) -> Result<Matrix<T>> {
        if c.shape() != (self.rows, self.cols) {
            return dim_err(format!("right side {:?}, operator expects {:?}", c.shape(), (self.rows, self.cols)));
        }
        let x = self.lu.solve(&c.vec_col_major());
        Ok(Matrix::from_col_major(self.rows, self.cols, &x))
    }
}

/// `σ_min = 1/‖K⁻¹‖₂`, from the largest eigenvalue of `K⁻ᵀK⁻¹`.
fn smallest_singular_value<T: Real>(lu: &Lu<T>) -> Result<f64> {
    let inv = lu.inverse();
    let gram = inv.tr_matmul(&inv);
    let top = sym_eig(&gram)?.values.first().copied().unwrap_or(T::zero());
    Ok(1.0 / top.to_f64_lossy().max(0.0).sqrt())
}

/// Solves `AX − XB = C` for arbitrary square `A` and `B`.
pub fn solve_sylvester_general<T: Real>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>> {
    GeneralSylvester::new(a, b)?.solve(c)
}

/// The four blocks of `ΘAΘᵀ` split at row and column `m`.
#[derive(Debug, Clone)]
pub struct InvariantBlocks<T> {
    pub a11: Matrix<T>,
    pub a12: Matrix<T>,
    pub a21: Matrix<T>,
    pub a22: Matrix<T>,
}

impl<T: Real> InvariantBlocks<T> {
    pub fn split(a: &Matrix<T>, m: usize) -> Result<Self> {
        check_square("A", a)?;
        let n = a.rows();
        crate::grassmann::OrthoFrame::<T>::identity(n, m)?;
        Ok(Self {
            a11: a.block(0, 0, m, m),
            a12: a.block(0, m, m, n - m),
            a21: a.block(m, 0, n - m, m),
            a22: a.block(m, m, n - m, n - m),
        })
    }

    pub fn m(&self) -> usize {
        self.a11.rows()
    }

    pub fn k(&self) -> usize {
        self.a22.rows()
    }

    /// `T(X) = A₁₁X − XA₂₂`.
    fn sylvester(&self, x: &Matrix<T>) -> Matrix<T> {
        &self.a11.matmul(x) - &x.matmul(&self.a22)
    }

    /// `T*(Z) = A₁₁ᵀZ − ZA₂₂ᵀ`.
    fn sylvester_adjoint(&self, z: &Matrix<T>) -> Matrix<T> {
        &self.a11.tr_matmul(z) - &z.matmul_tr(&self.a22)
    }

    /// `A₂₁ᵀ(ZᵀA₁₂ + A₂₁Z) + (A₁₂Zᵀ + ZA₂₁)A₂₁ᵀ`.
    fn coupling(&self, z: &Matrix<T>) -> Matrix<T> {
        let left = &z.tr_matmul(&self.a12) + &self.a21.matmul(z);
        let right = &self.a12.matmul_tr(z) + &z.matmul(&self.a21);
        &self.a21.tr_matmul(&left) + &right.matmul_tr(&self.a21)
    }

    /// Left side of the Newton equation: `T(T*(Z)) − coupling(Z)`.
    pub fn apply(&self, z: &Matrix<T>) -> Matrix<T> {
        &self.sylvester(&self.sylvester_adjoint(z)) - &self.coupling(z)
    }

    /// Right side `A₂₁ᵀA₂₂ − A₁₁A₂₁ᵀ`.
    pub fn rhs(&self) -> Matrix<T> {
        &self.a21.tr_matmul(&self.a22) - &self.a11.matmul_tr(&self.a21)
    }

    /// `‖apply(Z) − rhs‖_F`.
    pub fn residual(&self, z: &Matrix<T>) -> T {
        (&self.apply(z) - &self.rhs()).norm_fro()
    }

    /// Natural size of the equation's terms, for relative residuals.
    pub fn scale(&self, z: &Matrix<T>) -> T {
        let a = [&self.a11, &self.a12, &self.a21, &self.a22].iter().map(|b| b.norm_fro()).fold(T::zero(), T::max);
        a * a * z.norm_fro() + self.rhs().norm_fro()
    }

    /// Dense `d×d` matrix of [`apply`](Self::apply) on column-major
    /// vectorizations, `d = m(n − m)`.
    pub fn operator_matrix(&self) -> Matrix<T> {
        let (m, k) = (self.m(), self.k());
        let d = m * k;
        let mut op = Matrix::zeros(d, d);
        for col in 0..d {
            let mut e = Matrix::zeros(m, k);
            e[(col % m, col / m)] = T::one();
            let image = self.apply(&e).vec_col_major();
            for (row, v) in image.into_iter().enumerate() {
                op[(row, col)] = v;
            }
        }
        op
    }
}

/// Solves the Newton equation of the invariant-subspace cost by dense
/// assembly and LU. Fails with `SingularOperator` when the 1-norm condition
/// estimate reaches `1/ε`, or when the operator is at roundoff level
/// relative to `‖A‖²` (a degenerate critical point such as `A = I`).
pub fn solve_invariant_newton_direct<T: Real>(blocks: &InvariantBlocks<T>) -> Result<Matrix<T>> {
    let op = blocks.operator_matrix();
    let pivot = Tolerances::for_scalar::<T>().dense_pivot;
    let lu = Lu::factor(&op, pivot).map_err(|_| Error::SingularOperator { estimate: f64::INFINITY })?;
    let eps = T::epsilon().to_f64_lossy();
    let inv_norm = lu.inverse().norm_one().to_f64_lossy();
    let cond = op.norm_one().to_f64_lossy() * inv_norm;
    let natural = [&blocks.a11, &blocks.a12, &blocks.a21, &blocks.a22]
        .iter()
        .map(|b| b.norm_fro().to_f64_lossy())
        .fold(0.0, f64::max)
        .powi(2);
    let tiny = inv_norm * eps * natural * op.rows() as f64 >= 1.0;
    if !(cond < 1.0 / eps) || tiny {
        return Err(Error::SingularOperator { estimate: cond.max(inv_norm * natural) });
    }
    let z = lu.solve(&blocks.rhs().vec_col_major());
    Ok(Matrix::from_col_major(blocks.m(), blocks.k(), &z))
}

/// Outcome of the recursive solver.
#[derive(Debug, Clone)]
pub struct RecursiveSolution<T> {
    pub z: Matrix<T>,
    pub sweeps: usize,
}

/// Fixed-point form of the Newton equation, starting from `Z₀ = 0`:
/// solve `A₁₁X − XA₂₂ = coupling(Zⱼ₋₁) + rhs`, then `A₁₁ᵀZⱼ − ZⱼA₂₂ᵀ = X`.
pub fn solve_invariant_newton_recursive<T: Real>(
    blocks: &InvariantBlocks<T>,
    max_sweeps: usize,
    tol: T,
) -> Result<RecursiveSolution<T>> {
    let outer = GeneralSylvester::new(&blocks.a11, &blocks.a22)?;
    let inner = GeneralSylvester::new(&blocks.a11.transpose(), &blocks.a22.transpose())?;
    let b = blocks.rhs();
    let mut z = Matrix::zeros(blocks.m(), blocks.k());
    let mut last_change = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let x = outer.solve(&(&blocks.coupling(&z) + &b))?;
        let next = inner.solve(&x)?;
        let change = (&next - &z).norm_fro();
        let size = next.norm_fro();
        last_change = if size > T::zero() { (change / size).to_f64_lossy() } else { change.to_f64_lossy() };
        z = next;
        if !z.is_finite() {
            break;
        }
        if change <= tol * size {
            return Ok(RecursiveSolution { z, sweeps: sweep });
        }
    }
    Err(Error::NoConvergence { sweeps: max_sweeps, last_change })
}

/// Solves `Hx = g` by partial-pivot elimination.
pub fn solve_dense<T: Real>(h: &Matrix<T>, g: &[T]) -> Result<Vec<T>> {
    check_square("H", h)?;
    if g.len() != h.rows() {
        return dim_err(format!("right side of length {} for a {}x{} system", g.len(), h.rows(), h.cols()));
    }
    let lu = Lu::factor(h, Tolerances::for_scalar::<T>().dense_pivot).map_err(|_| Error::SingularOperator {
        estimate: f64::INFINITY,
    })?;
    Ok(lu.solve(g))
}
