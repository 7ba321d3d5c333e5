//! Local parametrizations `μ_P : T_P Gr → Gr` in frame coordinates.
//!
//! With `ξ = Θᵀ [[0, Z], [Zᵀ, 0]] Θ` the generator `[ξ, P]` reads
//! `Θᵀ Ω Θ` where `Ω = [[0, −Z], [Zᵀ, 0]]`. Each chart maps `Z` to a rotation
//! `R ∈ SO(n)` in frame coordinates; the new frame is `Rᵀ Θ` and the new point
//! is `Θᵀ R diag(I_m, 0) Rᵀ Θ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{OrthoFrame, Projector};
use crate::error::{Error, Result};
use crate::linalg::{cayley, cholesky_upper, exp_skew_pair, expm_series, qr_positive, spd_inverse, upper_triangular_inverse, Matrix};
use crate::scalar::Real;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartId {
    /// Riemannian normal coordinates.
    Exp,
    /// QR coordinates.
    Qr,
    Cayley,
}

impl ChartId {
    pub const ALL: [ChartId; 3] = [ChartId::Exp, ChartId::Qr, ChartId::Cayley];

    pub fn name(self) -> &'static str {
        match self {
            ChartId::Exp => "exp",
            ChartId::Qr => "qr",
            ChartId::Cayley => "cayley",
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChartId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp" => Ok(ChartId::Exp),
            "qr" => Ok(ChartId::Qr),
            "cayley" | "cay" => Ok(ChartId::Cayley),
            other => Err(Error::InvalidConfig(format!("unknown chart '{other}' (expected exp, qr or cayley)"))),
        }
    }
}

/// `Ω = [[0, −Z], [Zᵀ, 0]]`.
pub(crate) fn generator<T: Real>(z: &Matrix<T>) -> Matrix<T> {
    let (m, k) = z.shape();
    let mut omega = Matrix::zeros(m + k, m + k);
    omega.set_block(0, m, &-z);
    omega.set_block(m, 0, &z.transpose());
    omega
}

/// Q-factor of `[[I, −Z], [Zᵀ, I]]` in closed form:
/// `[[R₁⁻¹, −Z R₂⁻¹], [Zᵀ R₁⁻¹, R₂⁻¹]]` with `R₁ᵀR₁ = I + ZZᵀ` and
/// `R₂ᵀR₂ = I + ZᵀZ` upper Cholesky factors. The R-factor is `diag(R₁, R₂)`.
pub fn qr_chart_factor<T: Real>(z: &Matrix<T>) -> Result<Matrix<T>> {
    let (m, k) = z.shape();
    let r1 = cholesky_upper(&(&Matrix::identity(m) + &z.matmul_tr(z)))?;
    let r2 = cholesky_upper(&(&Matrix::identity(k) + &z.tr_matmul(z)))?;
    let r1i = upper_triangular_inverse(&r1)?;
    let r2i = upper_triangular_inverse(&r2)?;
    Ok(Matrix::from_blocks(&r1i, &-z.matmul(&r2i), &z.transpose().matmul(&r1i), &r2i))
}

/// Q-factor of `[[I, −Z], [Zᵀ, I]]` from the Householder factorization.
pub fn qr_chart_factor_generic<T: Real>(z: &Matrix<T>) -> Result<Matrix<T>> {
    let n = z.rows() + z.cols();
    Ok(qr_positive(&(&Matrix::identity(n) + &generator(z)))?.q)
}

/// `Cay(Ω) = (2I + Ω)(2I − Ω)⁻¹` in closed form:
/// `[[I − ¼ZZᵀ, −Z], [Zᵀ, I − ¼ZᵀZ]] · diag((I + ¼ZZᵀ)⁻¹, (I + ¼ZᵀZ)⁻¹)`.
pub fn cayley_chart_factor<T: Real>(z: &Matrix<T>) -> Result<Matrix<T>> {
    let (m, k) = z.shape();
    let q = T::lit(0.25);
    let zzt = z.matmul_tr(z).scale(q);
    let ztz = z.tr_matmul(z).scale(q);
    let a_inv = spd_inverse(&(&Matrix::identity(m) + &zzt))?;
    let b_inv = spd_inverse(&(&Matrix::identity(k) + &ztz))?;
    let n11 = &Matrix::identity(m) - &zzt;
    let n22 = &Matrix::identity(k) - &ztz;
    Ok(Matrix::from_blocks(
        &n11.matmul(&a_inv),
        &-z.matmul(&b_inv),
        &z.transpose().matmul(&a_inv),
        &n22.matmul(&b_inv),
    ))
}

/// The rotation of `chart` at parameter `Z`, in frame coordinates.
pub fn chart_rotation<T: Real>(chart: ChartId, z: &Matrix<T>) -> Result<Matrix<T>> {
    match chart {
        ChartId::Exp => Ok(exp_skew_pair(&-z)),
        ChartId::Qr => qr_chart_factor(z),
        ChartId::Cayley => cayley_chart_factor(z),
    }
}

impl<T: Real> OrthoFrame<T> {
    /// Frame of `μ(Z)` for the given chart.
    pub fn push(&self, chart: ChartId, z: &Matrix<T>) -> Result<Self> {
        self.check_param(z)?;
        Ok(self.rotated(&chart_rotation(chart, z)?))
    }
}

fn projector_from_rotation<T: Real>(frame: &OrthoFrame<T>, r: &Matrix<T>) -> Projector<T> {
    let m = frame.rank();
    let y = frame.theta().tr_matmul(&r.block(0, 0, r.rows(), m));
    Projector::from_trusted(y.matmul_tr(&y).symmetrized(), m)
}

pub fn chart<T: Real>(frame: &OrthoFrame<T>, chart: ChartId, z: &Matrix<T>) -> Result<Projector<T>> {
    frame.check_param(z)?;
    Ok(projector_from_rotation(frame, &chart_rotation(chart, z)?))
}

/// Riemannian normal coordinates: `e^{[ξ,P]} P e^{−[ξ,P]}`.
pub fn chart_exp<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Projector<T>> {
    chart(frame, ChartId::Exp, z)
}

/// QR coordinates: `(I + [ξ,P])_Q P (I + [ξ,P])_Qᵀ`, with the Q-factor taken
/// in frame coordinates.
pub fn chart_qr<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Projector<T>> {
    chart(frame, ChartId::Qr, z)
}

/// Cayley coordinates: `Cay([ξ,P]) P Cay(−[ξ,P])`.
pub fn chart_cayley<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Projector<T>> {
    chart(frame, ChartId::Cayley, z)
}

/// Exponential chart through the series exponential of the ambient
/// generator `[ξ, P]`.
pub fn chart_exp_series<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Projector<T>> {
    frame.check_param(z)?;
    let e = expm_series(&frame.from_frame(&generator(z)));
    let p = frame.projector();
    Ok(Projector::from_trusted(e.matmul(p.matrix()).matmul_tr(&e).symmetrized(), frame.rank()))
}

/// QR chart through Householder QR of `I + Ω` in frame coordinates.
pub fn chart_qr_generic<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Projector<T>> {
    frame.check_param(z)?;
    Ok(projector_from_rotation(frame, &qr_chart_factor_generic(z)?))
}

/// Cayley chart evaluated directly on `n×n` ambient matrices with LU solves.
pub fn chart_cayley_direct<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Projector<T>> {
    frame.check_param(z)?;
    let omega = frame.from_frame(&generator(z));
    let fwd = cayley(&omega)?;
    let back = cayley(&-&omega)?;
    let p = frame.projector();
    Ok(Projector::from_trusted(fwd.matmul(p.matrix()).matmul(&back).symmetrized(), frame.rank()))
}

/// Central second difference `(μ(hZ) − 2μ(0) + μ(−hZ)) / h²` with the
/// library's second-derivative step.
pub fn chart_second_derivative_check<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>, id: ChartId) -> Result<Matrix<T>> {
    let h = T::lit(Tolerances::for_scalar::<T>().fd_step_second);
    let plus = chart(frame, id, &z.scale(h))?.into_matrix();
    let minus = chart(frame, id, &z.scale(-h))?.into_matrix();
    let base = frame.projector().into_matrix();
    let num = &(&plus + &minus) - &base.scale(T::lit(2.0));
    Ok(num.scale(T::one() / (h * h)))
}

/// The common second derivative of every chart: `Θᵀ diag(−2ZZᵀ, 2ZᵀZ) Θ`.
pub fn chart_second_derivative<T: Real>(frame: &OrthoFrame<T>, z: &Matrix<T>) -> Result<Matrix<T>> {
    frame.check_param(z)?;
    let two = T::lit(2.0);
    let zero = Matrix::zeros(z.rows(), z.cols());
    let k = Matrix::from_blocks(&z.matmul_tr(z).scale(-two), &zero, &zero.transpose(), &z.tr_matmul(z).scale(two));
    Ok(frame.from_frame(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::random_projector;
    use crate::linalg::det;
    use crate::random;

    type M = Matrix<f64>;

    fn setup(n: usize, m: usize, seed: u64) -> (OrthoFrame<f64>, M) {
        let (_, f) = random_projector(n, m, seed).unwrap();
        let mut rng = random::rng(seed + 100);
        (f, random::gaussian(&mut rng, m, n - m))
    }

    #[test]
    fn zero_parameter_is_base_point() {
        let (f, z) = setup(5, 2, 1);
        let zero = z.scale(0.0);
        for id in ChartId::ALL {
            let p = chart(&f, id, &zero).unwrap();
            assert!((p.matrix() - f.projector().matrix()).max_abs() < 1e-14, "{id}");
        }
    }

    #[test]
    fn rotations_are_special_orthogonal() {
        let (_, z) = setup(6, 2, 2);
        for id in ChartId::ALL {
            let r = chart_rotation(id, &z).unwrap();
            assert!(r.orthogonality_residual() < 1e-13, "{id}");
            assert!((det(&r) - 1.0).abs() < 1e-12, "{id}");
        }
    }

    #[test]
    fn qr_closed_form_matches_householder() {
        for seed in 0..5 {
            let (_, z) = setup(7, 3, seed);
            let d = (&qr_chart_factor(&z).unwrap() - &qr_chart_factor_generic(&z).unwrap()).max_abs();
            assert!(d < 1e-12, "seed {seed}: {d}");
        }
    }

    #[test]
    fn dual_routes_agree() {
        let (f, z) = setup(6, 2, 9);
        let pairs = [
            (chart_exp(&f, &z).unwrap(), chart_exp_series(&f, &z).unwrap()),
            (chart_qr(&f, &z).unwrap(), chart_qr_generic(&f, &z).unwrap()),
            (chart_cayley(&f, &z).unwrap(), chart_cayley_direct(&f, &z).unwrap()),
        ];
        for (a, b) in pairs {
            assert!((a.matrix() - b.matrix()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn first_derivative_is_identity() {
        let (f, z) = setup(5, 2, 4);
        let h = 1e-4;
        let xi = f.tangent(&z).unwrap();
        for id in ChartId::ALL {
            let plus = chart(&f, id, &z.scale(h)).unwrap().into_matrix();
            let minus = chart(&f, id, &z.scale(-h)).unwrap().into_matrix();
            let fd = (&plus - &minus).scale(0.5 / h);
            assert!((&fd - &xi).max_abs() < 1e-6, "{id}");
        }
    }

    #[test]
    fn planar_second_derivative() {
        let f = OrthoFrame::<f64>::identity(2, 1).unwrap();
        let z = M::from_rows(&[vec![0.7]]).unwrap();
        let expected = M::diag(&[-2.0 * 0.49, 2.0 * 0.49]);
        assert!((&chart_second_derivative(&f, &z).unwrap() - &expected).max_abs() < 1e-15);
        for id in ChartId::ALL {
            let fd = chart_second_derivative_check(&f, &z, id).unwrap();
            assert!((&fd - &expected).max_abs() < 1e-4, "{id}");
        }
    }

    #[test]
    fn cayley_basis_direction() {
        // the image of Gr(1,2) at Z = z is spanned by (1 − z²/4, z)
        let f = OrthoFrame::<f64>::identity(2, 1).unwrap();
        let z = 2.0;
        let p = chart_cayley(&f, &M::from_rows(&[vec![z]]).unwrap()).unwrap();
        assert!((p.matrix() - &M::diag(&[0.0, 1.0])).max_abs() < 1e-15);
    }

    #[test]
    fn chart_ids_parse() {
        assert_eq!("QR".parse::<ChartId>().unwrap(), ChartId::Qr);
        assert_eq!("cayley".parse::<ChartId>().unwrap().to_string(), "cayley");
        assert!("polar".parse::<ChartId>().is_err());
    }
}
