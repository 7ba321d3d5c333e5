//! The three run subcommands.

use std::collections::BTreeMap;

use super::report::{ReportConfig, RunReport};
use super::{read_matrix, CliError, InvariantArgs, LgArgs, RunArgs, SolverArg, GrArgs};
use crate::costs::{HamiltonianRayleighCost, InvariantSubspaceCost, RayleighCost};
use crate::grassmann::{random_projector, ChartId, OrthoFrame, Projector};
use crate::lagrange::{random_lag_projector, SymplecticFrame};
use crate::linalg::Matrix;
use crate::newton::{
    rayleigh_limit_reference, run_algorithm1, run_algorithm2, run_algorithm3, run_newton, run_newton_lg, NewtonConfig,
    NewtonOutcome, SolverChoice, Status,
};
use crate::random;

/// Input-validation thresholds of the command line.
const INPUT_SYMMETRY_TOL: f64 = 1e-8;
const INPUT_STRUCTURE_TOL: f64 = 1e-8;

/// Report plus the exit code it maps to.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: RunReport,
    pub exit_code: i32,
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => 0,
        Status::MaxIters => 2,
        Status::SingularHessian | Status::SpectralOverlap | Status::SolverFailure => 3,
    }
}

fn scale(a: &Matrix<f64>) -> f64 {
    a.max_abs().max(1.0)
}

fn square(a: &Matrix<f64>) -> Result<usize, CliError> {
    if !a.is_square() {
        return Err(CliError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(a.rows())
}

fn check_rank(n: usize, m: usize) -> Result<(), CliError> {
    if m == 0 || m >= n {
        return Err(CliError::BadRank { n, m });
    }
    Ok(())
}

fn check_symmetric(a: &Matrix<f64>) -> Result<(), CliError> {
    let residual = a.symmetry_residual();
    if residual > INPUT_SYMMETRY_TOL * scale(a) {
        return Err(CliError::InputNotSymmetric { residual });
    }
    Ok(())
}

impl RunArgs {
    fn newton_config(&self) -> Result<NewtonConfig, CliError> {
        let config = NewtonConfig {
            mu: self.mu,
            nu: self.nu,
            max_iters: self.max_iters,
            grad_tol: self.tol,
            step_tol: self.step_tol,
            seed: self.seed,
            ..Default::default()
        };
        config.validate()?;
        if !(self.perturb >= 0.0 && self.perturb.is_finite()) {
            return Err(CliError::InvalidArgument(format!("--perturb must be finite and non-negative, got {}", self.perturb)));
        }
        Ok(config)
    }

    fn specialized(&self) -> bool {
        (self.mu, self.nu) == (ChartId::Exp, ChartId::Qr)
    }

    fn echo(&self, n: usize, m: usize, solver: Option<String>) -> ReportConfig {
        ReportConfig {
            input: self.matrix.display().to_string(),
            engine: if self.specialized() { "algorithm" } else { "generic" }.into(),
            n,
            m,
            mu: self.mu,
            nu: self.nu,
            grad_tol: self.tol,
            step_tol: self.step_tol,
            max_iters: self.max_iters,
            seed: self.seed,
            perturb: self.perturb,
            start: self.start.as_ref().map(|p| p.display().to_string()),
            random_start: self.random_start,
            solver,
        }
    }

    /// `Z` with `‖ξ‖_F = √2‖Z‖_F` equal to `--perturb`.
    fn perturbation(&self, rows: usize, cols: usize, symmetric: bool) -> Matrix<f64> {
        let mut rng = random::rng(self.seed);
        let z: Matrix<f64> = if symmetric { random::symmetric(&mut rng, rows) } else { random::gaussian(&mut rng, rows, cols) };
        let norm = z.norm_fro();
        if self.perturb == 0.0 || norm == 0.0 {
            return Matrix::zeros(rows, cols);
        }
        z.scale(self.perturb / (std::f64::consts::SQRT_2 * norm))
    }

    fn gr_start(&self, n: usize, m: usize) -> Result<OrthoFrame<f64>, CliError> {
        if self.random_start {
            return Ok(random_projector(n, m, self.seed)?.1);
        }
        let base = match &self.start {
            Some(path) => {
                let y = read_matrix(path)?;
                if y.shape() != (n, m) {
                    return Err(CliError::InvalidArgument(format!("start basis is {:?}, expected {n}x{m}", y.shape())));
                }
                OrthoFrame::from_basis(&y)?
            }
            None => OrthoFrame::identity(n, m)?,
        };
        Ok(base.push(ChartId::Exp, &self.perturbation(m, n - m, false))?)
    }

    fn lg_start(&self, half: usize) -> Result<SymplecticFrame<f64>, CliError> {
        if self.random_start {
            return Ok(random_lag_projector(half, self.seed)?.1);
        }
        let base = match &self.start {
            Some(path) => {
                let y = read_matrix(path)?;
                if y.shape() != (2 * half, half) {
                    return Err(CliError::InvalidArgument(format!(
                        "start basis is {:?}, expected {}x{half}",
                        y.shape(),
                        2 * half
                    )));
                }
                SymplecticFrame::from_basis(&y)?
            }
            None => SymplecticFrame::identity(half)?,
        };
        Ok(base.push(ChartId::Exp, &self.perturbation(half, half, true))?)
    }
}

/// Runs once, then again against the spectral projector nearest the limit
/// when one is clearly identified.
fn with_spectral_reference<F>(
    a: &Matrix<f64>,
    run: impl Fn(Option<&Projector<f64>>) -> crate::Result<NewtonOutcome<F>>,
    projector: impl Fn(&F) -> Projector<f64>,
) -> Result<NewtonOutcome<F>, CliError> {
    let first = run(None)?;
    if first.trace.status != Status::Converged {
        return Ok(first);
    }
    match rayleigh_limit_reference(a, &projector(&first.frame))? {
        Some(reference) => Ok(run(Some(&reference))?),
        None => Ok(first),
    }
}

pub fn cmd_rayleigh_gr(args: &GrArgs) -> Result<CommandOutput, CliError> {
    let run_args = &args.run;
    let a = read_matrix(&run_args.matrix)?;
    let n = square(&a)?;
    check_rank(n, args.m)?;
    check_symmetric(&a)?;
    let config = run_args.newton_config()?;
    let cost = RayleighCost::new(a.symmetrized())?;
    let start = run_args.gr_start(n, args.m)?;
    let outcome = with_spectral_reference(
        cost.matrix(),
        |r| {
            if run_args.specialized() {
                run_algorithm1(&cost, start.clone(), &config, r)
            } else {
                run_newton(&cost, start.clone(), &config, r)
            }
        },
        |f| f.projector(),
    )?;
    let p = outcome.frame.projector();
    let extra = BTreeMap::from([("orthogonality".to_string(), outcome.frame.orthogonality_residual())]);
    let report = RunReport::build("rayleigh-gr", run_args.echo(n, args.m, None), &outcome.trace, &p, extra);
    Ok(CommandOutput { exit_code: exit_code(outcome.trace.status), report })
}

pub fn cmd_rayleigh_lg(args: &LgArgs) -> Result<CommandOutput, CliError> {
    let run_args = &args.run;
    let h = read_matrix(&run_args.matrix)?;
    let n = square(&h)?;
    if n % 2 != 0 {
        return Err(CliError::OddDimension { n });
    }
    check_symmetric(&h)?;
    let h = h.symmetrized();
    let j = Matrix::symplectic_j(n / 2);
    let jhj = j.matmul(&h).matmul(&j);
    let residual = (&jhj - &h).max_abs();
    if residual > INPUT_STRUCTURE_TOL * scale(&h) {
        return Err(CliError::InputNotHamiltonianSymmetric { residual });
    }
    let config = run_args.newton_config()?;
    let cost = HamiltonianRayleighCost::new((&h + &jhj).scale(0.5).symmetrized())?;
    let start = run_args.lg_start(n / 2)?;
    let outcome = with_spectral_reference(
        cost.matrix(),
        |r| {
            if run_args.specialized() {
                run_algorithm2(&cost, start.clone(), &config, r)
            } else {
                run_newton_lg(&cost, start.clone(), &config, r)
            }
        },
        |f| f.projector().into_projector(),
    )?;
    let lp = outcome.frame.projector();
    let extra = BTreeMap::from([
        ("lagrangian".to_string(), lp.lagrangian_residual()),
        ("orthogonality".to_string(), outcome.frame.orthogonality_residual()),
        ("symplecticity".to_string(), outcome.frame.symplecticity_residual()),
    ]);
    let report = RunReport::build("rayleigh-lg", run_args.echo(n, n / 2, None), &outcome.trace, lp.as_projector(), extra);
    Ok(CommandOutput { exit_code: exit_code(outcome.trace.status), report })
}

pub fn cmd_invariant(args: &InvariantArgs) -> Result<CommandOutput, CliError> {
    let run_args = &args.run;
    let a = read_matrix(&run_args.matrix)?;
    let n = square(&a)?;
    check_rank(n, args.m)?;
    let config = run_args.newton_config()?;
    let cost = InvariantSubspaceCost::new(a)?;
    let start = run_args.gr_start(n, args.m)?;
    let solver = match args.solver {
        SolverArg::Direct => SolverChoice::Direct,
        SolverArg::Recursive => SolverChoice::recursive(),
    };
    let outcome = if run_args.specialized() {
        run_algorithm3(&cost, start, &config, solver, None)?
    } else {
        run_newton(&cost, start, &config, None)?
    };
    let p = outcome.frame.projector();
    let extra = BTreeMap::from([
        ("invariance".to_string(), cost.invariance_residual(p.matrix())),
        ("orthogonality".to_string(), outcome.frame.orthogonality_residual()),
    ]);
    let solver_name = match args.solver {
        SolverArg::Direct => "direct",
        SolverArg::Recursive => "recursive",
    };
    let report = RunReport::build("invariant", run_args.echo(n, args.m, Some(solver_name.into())), &outcome.trace, &p, extra);
    Ok(CommandOutput { exit_code: exit_code(outcome.trace.status), report })
}
