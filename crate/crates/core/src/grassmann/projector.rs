use crate::error::{dim_err, Error, Result};
use crate::linalg::{det, qr_positive, sym_eig, Matrix};
use crate::random;
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// A point of `Gr(m, n)`: a symmetric idempotent `n×n` matrix of trace `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T> {
    matrix: Matrix<T>,
    rank: usize,
}

pub(crate) fn check_rank(n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::BadRank { n, m });
    }
    Ok(())
}

impl<T: Real> Projector<T> {
    /// Validates `p` against the projector invariants and stores its
    /// symmetric part.
    pub fn new(p: Matrix<T>, m: usize) -> Result<Self> {
        if !p.is_square() {
            return dim_err(format!("projector must be square, got {:?}", p.shape()));
        }
        check_rank(p.rows(), m)?;
        let tol = Tolerances::for_scalar::<T>();
        if !p.is_finite() {
            return Err(Error::NotAProjector { m, residual: f64::INFINITY });
        }
        let asym = p.symmetry_residual().to_f64_lossy();
        if asym > tol.projector {
            return Err(Error::NotSymmetric { residual: asym });
        }
        let candidate = Self { matrix: p.symmetrized(), rank: m };
        let residual = candidate.idempotence_residual().max(candidate.trace_residual()).to_f64_lossy();
        if residual > tol.projector {
            return Err(Error::NotAProjector { m, residual });
        }
        Ok(candidate)
    }

    /// Wraps a matrix that is a projector by construction.
    pub(crate) fn from_trusted(matrix: Matrix<T>, rank: usize) -> Self {
        Self { matrix, rank }
    }

    /// `diag(I_m, 0)`.
    pub fn coordinate(n: usize, m: usize) -> Result<Self> {
        check_rank(n, m)?;
        Ok(Self::from_trusted(Matrix::coordinate_projector(n, m), m))
    }

    /// Orthogonal projector onto the column span of a full-rank `n×m` matrix.
    pub fn from_basis(y: &Matrix<T>) -> Result<Self> {
        Ok(OrthoFrame::from_basis(y)?.projector())
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `‖P² − P‖_F`.
    pub fn idempotence_residual(&self) -> T {
        (&self.matrix.matmul(&self.matrix) - &self.matrix).norm_fro()
    }

    /// `|tr P − m|`.
    pub fn trace_residual(&self) -> T {
        (self.matrix.trace() - T::from_count(self.rank)).abs()
    }

    /// `I − P`, a point of `Gr(n − m, n)`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self::from_trusted(&Matrix::identity(n) - &self.matrix, n - self.rank)
    }
}

/// An orthogonal `Θ` with `P = Θᵀ diag(I_m, 0) Θ`: the first `m` rows of `Θ`
/// are an orthonormal basis of the subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoFrame<T> {
    theta: Matrix<T>,
    rank: usize,
}

impl<T: Real> OrthoFrame<T> {
    pub fn new(theta: Matrix<T>, m: usize) -> Result<Self> {
        if !theta.is_square() {
            return dim_err(format!("frame must be square, got {:?}", theta.shape()));
        }
        check_rank(theta.rows(), m)?;
        let residual = theta.orthogonality_residual().to_f64_lossy();
        if !(residual <= Tolerances::for_scalar::<T>().orthogonality) {
            return Err(Error::NotOrthogonal { residual });
        }
        Ok(Self { theta, rank: m })
    }

    pub(crate) fn from_trusted(theta: Matrix<T>, rank: usize) -> Self {
        Self { theta, rank }
    }

    pub fn identity(n: usize, m: usize) -> Result<Self> {
        check_rank(n, m)?;
        Ok(Self::from_trusted(Matrix::identity(n), m))
    }

    /// Completes a full-rank `n×m` matrix to a frame whose leading rows span
    /// its column space. The determinant is fixed to `+1`.
    pub fn from_basis(y: &Matrix<T>) -> Result<Self> {
        let (n, m) = y.shape();
        check_rank(n, m)?;
        let q = qr_positive(y)?.q;
        let mut theta = q.transpose();
        if det(&theta) < T::zero() {
            theta.negate_row(n - 1);
        }
        Ok(Self::from_trusted(theta, m))
    }

    pub fn theta(&self) -> &Matrix<T> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal basis of the subspace as an `n×m` matrix.
    pub fn basis(&self) -> Matrix<T> {
        self.theta.block(0, 0, self.rank, self.dim()).transpose()
    }

    /// Orthonormal basis of the orthogonal complement, `n×(n−m)`.
    pub fn complement_basis(&self) -> Matrix<T> {
        let n = self.dim();
        self.theta.block(self.rank, 0, n - self.rank, n).transpose()
    }

    pub fn projector(&self) -> Projector<T> {
        let y = self.basis();
        Projector::from_trusted(y.matmul_tr(&y), self.rank)
    }

    /// `Θ X Θᵀ`.
    pub fn to_frame(&self, x: &Matrix<T>) -> Matrix<T> {
        self.theta.matmul(x).matmul_tr(&self.theta)
    }

    /// `Θᵀ K Θ`.
    pub fn from_frame(&self, k: &Matrix<T>) -> Matrix<T> {
        self.theta.tr_matmul(k).matmul(&self.theta)
    }

    pub(crate) fn check_param(&self, z: &Matrix<T>) -> Result<()> {
        let expected = (self.rank, self.dim() - self.rank);
        if z.shape() != expected {
            return dim_err(format!("tangent parameter {:?}, frame expects {:?}", z.shape(), expected));
        }
        Ok(())
    }

    /// Tangent vector `ξ = Θᵀ [[0, Z], [Zᵀ, 0]] Θ`.
    pub fn tangent(&self, z: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_param(z)?;
        let n = self.dim();
        let mut k = Matrix::zeros(n, n);
        k.set_block(0, self.rank, z);
        k.set_block(self.rank, 0, &z.transpose());
        Ok(self.from_frame(&k))
    }

    /// Inverse of [`tangent`](Self::tangent): the upper-right block of `Θ ξ Θᵀ`.
    pub fn tangent_param(&self, xi: &Matrix<T>) -> Result<Matrix<T>> {
        let n = self.dim();
        if xi.shape() != (n, n) {
            return dim_err(format!("tangent vector {:?} for frame of size {n}", xi.shape()));
        }
        Ok(self.to_frame(xi).block(0, self.rank, self.rank, n - self.rank))
    }

    /// Frame `Rᵀ Θ` for a rotation `R` given in frame coordinates.
    pub(crate) fn rotated(&self, r: &Matrix<T>) -> Self {
        Self::from_trusted(r.tr_matmul(&self.theta), self.rank)
    }

    /// Restores orthogonality through the positive-diagonal QR of `Θᵀ`. The
    /// span of the leading rows and the determinant sign are preserved.
    pub fn reorthogonalized(&self) -> Result<Self> {
        let q = qr_positive(&self.theta.transpose())?.q;
        Ok(Self::from_trusted(q.transpose(), self.rank))
    }

    pub fn orthogonality_residual(&self) -> T {
        self.theta.orthogonality_residual()
    }
}

/// `[P, [P, X]]`, the orthogonal projection of a symmetric `X` onto `T_P Gr`.
pub fn tangent_project<T: Real>(p: &Projector<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    let n = p.dim();
    if x.shape() != (n, n) {
        return dim_err(format!("cannot project {:?} at a point of size {n}", x.shape()));
    }
    Ok(ad_squared(p.matrix(), x))
}

pub(crate) fn ad_squared<T: Real>(p: &Matrix<T>, x: &Matrix<T>) -> Matrix<T> {
    p.commutator(&p.commutator(x)).symmetrized()
}

/// Seeded random point with a frame: `Θ` is the positive-diagonal QR factor
/// of a Gaussian matrix, with one row negated if needed so that `det Θ = 1`.
pub fn random_projector<T: Real>(n: usize, m: usize, seed: u64) -> Result<(Projector<T>, OrthoFrame<T>)> {
    check_rank(n, m)?;
    let mut rng = random::rng(seed);
    let frame = OrthoFrame::from_trusted(random::special_orthogonal(&mut rng, n).transpose(), m);
    Ok((frame.projector(), frame))
}

/// A frame for `P` from its eigenvectors (eigenvalue 1 first).
pub fn frame_from_projector<T: Real>(p: &Projector<T>) -> Result<OrthoFrame<T>> {
    let eig = sym_eig(p.matrix())?;
    let n = p.dim();
    let mut theta = eig.vectors.transpose();
    if det(&theta) < T::zero() {
        theta.negate_row(n - 1);
    }
    Ok(OrthoFrame::from_trusted(theta, p.rank()))
}
