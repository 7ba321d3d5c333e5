//! Tolerances used by the library, the check suites and the CLI.
//!
//! Values are stated for `f64`. [`Tolerances::for_scalar`] rescales every
//! entry by the ratio of machine epsilons so the same record can drive `f32`
//! runs.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative symmetry residual accepted for symmetric inputs.
    pub symmetry: f64,
    /// Idempotence and trace residual accepted for projectors.
    pub projector: f64,
    /// Orthogonality residual accepted for frames.
    pub orthogonality: f64,
    /// Absolute pivot threshold (times the matrix norm) for QR rank checks.
    pub qr_pivot: f64,
    /// Relative spectral gap below which Sylvester and Lyapunov solves refuse.
    pub spectral_gap: f64,
    /// Pivot threshold (times the matrix norm) for dense elimination.
    pub dense_pivot: f64,
    /// Jacobi sweeps before the eigensolver gives up.
    pub jacobi_max_sweeps: usize,
    /// Central-difference step for first derivatives.
    pub fd_step_first: f64,
    /// Central-difference step for second derivatives.
    pub fd_step_second: f64,
    /// Frame multiplications between re-orthogonalizations in the generic engine.
    pub reorthogonalize_every: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-12,
            projector: 1e-10,
            orthogonality: 1e-10,
            qr_pivot: 1e-12,
            spectral_gap: 1e-8,
            dense_pivot: 1e-12,
            jacobi_max_sweeps: 100,
            fd_step_first: 1e-4,
            fd_step_second: 1e-3,
            reorthogonalize_every: 20,
        }
    }
}

impl Tolerances {
    /// Defaults rescaled to the precision of `T`.
    pub fn for_scalar<T: Real>() -> Self {
        let ratio = T::epsilon().to_f64_lossy() / f64::EPSILON;
        if ratio <= 1.0 {
            return Self::default();
        }
        let d = Self::default();
        Self {
            symmetry: d.symmetry * ratio,
            projector: d.projector * ratio,
            orthogonality: d.orthogonality * ratio,
            qr_pivot: d.qr_pivot * ratio,
            spectral_gap: (d.spectral_gap * ratio).min(1e-2),
            dense_pivot: d.dense_pivot * ratio,
            fd_step_first: 1e-2,
            fd_step_second: 3e-2,
            ..d
        }
    }
}
