//! Two-chart Newton iteration on `Gr(m, n)` and `LG(n)`: pull the cost back
//! through a chart `μ`, take a Euclidean Newton step at the origin and push
//! the step forward through a chart `ν`.

mod algorithms;
mod generic;
mod rate;

use std::time::{Duration, Instant};

pub use algorithms::{
    algorithm1_step, algorithm2_step, algorithm3_step, rayleigh_limit_reference, run_algorithm1, run_algorithm2,
    run_algorithm3, SolverChoice,
};
pub use generic::{
    lg_newton_system, newton_step_generic, newton_step_generic_lg, newton_system, run_newton, run_newton_lg,
};
pub use rate::{estimate_quadratic_rate, estimate_quadratic_rate_with, rate_from_trace, QuadraticRateEstimate};

use crate::error::{Error, Result};
use crate::grassmann::{distance, ChartId, OrthoFrame, Projector};
use crate::lagrange::SymplecticFrame;
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// Settings shared by the generic engine and the specialized algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Chart used to pull the cost back.
    pub mu: ChartId,
    /// Chart used to push the Newton step forward.
    pub nu: ChartId,
    /// Number of Newton steps allowed.
    pub max_iters: usize,
    /// Stop once the Frobenius norm of the Riemannian gradient is at or below this.
    pub grad_tol: f64,
    /// Stop once a step `‖ξ‖_F` is at or below this.
    pub step_tol: f64,
    pub seed: u64,
    /// Re-orthogonalize the generic engine's frame every this many steps
    /// (0 disables). The specialized algorithms re-orthogonalize every step.
    pub reorthogonalize_every: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            mu: ChartId::Exp,
            nu: ChartId::Qr,
            max_iters: 50,
            grad_tol: 1e-12,
            step_tol: 1e-14,
            seed: 0,
            reorthogonalize_every: Tolerances::default().reorthogonalize_every,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        for (name, v) in [("grad_tol", self.grad_tol), ("step_tol", self.step_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    /// The Newton operator (Hessian or its matrix-equation form) is singular.
    SingularHessian,
    SpectralOverlap,
    /// Any other step failure, e.g. the recursive solver not converging.
    SolverFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max_iters",
            Status::SingularHessian => "singular_hessian",
            Status::SpectralOverlap => "spectral_overlap",
            Status::SolverFailure => "solver_failure",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::SingularOperator { .. } => Status::SingularHessian,
            Error::SpectralOverlap { .. } => Status::SpectralOverlap,
            _ => Status::SolverFailure,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where the per-iterate distances come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Supplied,
    /// Distances to the final iterate; the last two entries carry no rate
    /// information.
    FinalIterate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub cost: f64,
    /// Frobenius norm of the Riemannian gradient.
    pub grad_norm: f64,
    /// `‖ξ‖_F` of the step that produced this iterate (0 for the start).
    pub step_norm: f64,
    pub distance: Option<f64>,
    /// Orthogonality residual of the frame, and symplecticity residual on `LG(n)`.
    pub frame_residual: f64,
    /// `‖P² − P‖_F` of the derived projector.
    pub idempotence_residual: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonTrace {
    pub records: Vec<IterRecord>,
    pub status: Status,
    pub failure: Option<Error>,
    pub reference: Option<ReferenceKind>,
}

impl NewtonTrace {
    pub fn last(&self) -> &IterRecord {
        self.records.last().expect("a trace always holds the starting iterate")
    }

    /// Number of Newton steps taken.
    pub fn steps(&self) -> usize {
        self.last().iter
    }

    pub fn distances(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.distance).collect()
    }
}

/// Result of a run: the trace and the final frame.
#[derive(Debug, Clone)]
pub struct NewtonOutcome<F> {
    pub trace: NewtonTrace,
    pub frame: F,
}

/// Result of a single step.
#[derive(Debug, Clone)]
pub struct StepOutcome<T, F> {
    pub frame: F,
    /// Tangent parameter of the step.
    pub z: Matrix<T>,
    pub step_norm: f64,
}

impl<T: Real, F> StepOutcome<T, F> {
    fn new(frame: F, z: Matrix<T>) -> Self {
        let step_norm = std::f64::consts::SQRT_2 * z.norm_fro().to_f64_lossy();
        Self { frame, z, step_norm }
    }
}

/// Frame types the run loop can iterate.
pub trait IterateFrame<T: Real>: Clone {
    fn ambient_projector(&self) -> Projector<T>;
    fn structure_residual(&self) -> f64;
    fn reorthogonalize(&self) -> Result<Self>;
}

impl<T: Real> IterateFrame<T> for OrthoFrame<T> {
    fn ambient_projector(&self) -> Projector<T> {
        self.projector()
    }

    fn structure_residual(&self) -> f64 {
        self.orthogonality_residual().to_f64_lossy()
    }

    fn reorthogonalize(&self) -> Result<Self> {
        self.reorthogonalized()
    }
}

impl<T: Real> IterateFrame<T> for SymplecticFrame<T> {
    fn ambient_projector(&self) -> Projector<T> {
        self.projector().into_projector()
    }

    fn structure_residual(&self) -> f64 {
        self.orthogonality_residual().to_f64_lossy().max(self.symplecticity_residual().to_f64_lossy())
    }

    fn reorthogonalize(&self) -> Result<Self> {
        self.reorthogonalized()
    }
}

/// Shared run loop. `measure` returns `(cost, grad_norm)` at a projector,
/// `step` advances the frame.
pub(crate) fn drive<T: Real, F: IterateFrame<T>>(
    start: F,
    config: &NewtonConfig,
    reference: Option<&Projector<T>>,
    reorthogonalize_every: usize,
    measure: impl Fn(&Projector<T>) -> Result<(T, T)>,
    step: impl Fn(&F) -> Result<StepOutcome<T, F>>,
) -> Result<NewtonOutcome<F>> {
    config.validate()?;
    if let Some(r) = reference {
        let p = start.ambient_projector();
        if (r.dim(), r.rank()) != (p.dim(), p.rank()) {
            return crate::error::dim_err(format!(
                "reference lives in Gr({}, {}), iterates in Gr({}, {})",
                r.rank(),
                r.dim(),
                p.rank(),
                p.dim()
            ));
        }
    }
    let clock = Instant::now();
    let mut frame = start;
    let mut records = Vec::new();
    let mut iterates = Vec::new();
    let mut step_norm = 0.0;
    let mut failure = None;
    let status = loop {
        let iter = records.len();
        let p = frame.ambient_projector();
        let (cost, grad_norm) = measure(&p)?;
        let (cost, grad_norm) = (cost.to_f64_lossy(), grad_norm.to_f64_lossy());
        records.push(IterRecord {
            iter,
            cost,
            grad_norm,
            step_norm,
            distance: reference.map(|r| distance(&p, r).map(|d| d.to_f64_lossy())).transpose()?,
            frame_residual: frame.structure_residual(),
            idempotence_residual: p.idempotence_residual().to_f64_lossy(),
            elapsed: clock.elapsed(),
        });
        if reference.is_none() {
            iterates.push(p);
        }
        if !(grad_norm.is_finite() && cost.is_finite()) {
            failure = Some(Error::ConvergenceFailure { what: "iterate became non-finite".into(), iterations: iter });
            break Status::SolverFailure;
        }
        if grad_norm <= config.grad_tol || (iter > 0 && step_norm <= config.step_tol) {
            // a critical point only counts if the Newton operator there is regular
            if let Err(e) = step(&frame) {
                let status = Status::from_error(&e);
                failure = Some(e);
                break status;
            }
            break Status::Converged;
        }
        if iter >= config.max_iters {
            break Status::MaxIters;
        }
        match step(&frame) {
            Ok(out) => {
                step_norm = out.step_norm;
                frame = out.frame;
                if reorthogonalize_every > 0 && (iter + 1) % reorthogonalize_every == 0 {
                    frame = frame.reorthogonalize()?;
                }
            }
            Err(e) => {
                let status = Status::from_error(&e);
                failure = Some(e);
                break status;
            }
        }
    };
    let reference_kind = match reference {
        Some(_) => Some(ReferenceKind::Supplied),
        None => {
            let last = iterates.last().expect("at least one iterate").clone();
            for (rec, p) in records.iter_mut().zip(&iterates) {
                rec.distance = Some(distance(p, &last)?.to_f64_lossy());
            }
            Some(ReferenceKind::FinalIterate)
        }
    };
    Ok(NewtonOutcome { trace: NewtonTrace { records, status, failure, reference: reference_kind }, frame })
}
