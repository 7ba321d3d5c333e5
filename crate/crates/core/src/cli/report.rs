//! JSON run report, schema version "1".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::grassmann::{ChartId, Projector};
use crate::newton::{rate_from_trace, NewtonTrace, ReferenceKind, Status};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub schema_version: String,
    pub command: String,
    pub config: ReportConfig,
    pub iterations: Vec<ReportIteration>,
    pub status: String,
    /// Error message of a failed step, if any.
    pub diagnostic: Option<String>,
    pub rate: ReportRate,
    #[serde(rename = "final")]
    pub final_state: ReportFinal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub input: String,
    /// `algorithm` for the frame-form iteration, `generic` for the coordinate engine.
    pub engine: String,
    pub n: usize,
    pub m: usize,
    pub mu: ChartId,
    pub nu: ChartId,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub perturb: f64,
    pub start: Option<String>,
    pub random_start: bool,
    pub solver: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportIteration {
    pub iter: usize,
    pub cost: f64,
    pub grad_norm: f64,
    pub step_norm: f64,
    pub distance: Option<f64>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRate {
    pub ratios: Vec<f64>,
    pub slope: Option<f64>,
    /// `quadratic`, `not_quadratic` or `insufficient_data`.
    pub verdict: String,
    /// `supplied` or `final_iterate`.
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFinal {
    pub trace: f64,
    pub idempotence_residual: f64,
    pub frobenius_norm: f64,
    pub projector: Vec<Vec<f64>>,
    pub extra_residuals: BTreeMap<String, f64>,
}

const STATUSES: [&str; 5] = ["converged", "max_iters", "singular_hessian", "spectral_overlap", "solver_failure"];
const VERDICTS: [&str; 3] = ["quadratic", "not_quadratic", "insufficient_data"];

impl RunReport {
    pub fn build(
        command: &str,
        config: ReportConfig,
        trace: &NewtonTrace,
        projector: &Projector<f64>,
        extra_residuals: BTreeMap<String, f64>,
    ) -> Self {
        let iterations = trace
            .records
            .iter()
            .filter(|r| r.cost.is_finite() && r.grad_norm.is_finite())
            .map(|r| ReportIteration {
                iter: r.iter,
                cost: r.cost,
                grad_norm: r.grad_norm,
                step_norm: r.step_norm,
                distance: r.distance.filter(|d| d.is_finite()),
                elapsed_ms: r.elapsed.as_secs_f64() * 1e3,
            })
            .collect();
        let rate = match rate_from_trace(trace) {
            Ok(est) => ReportRate {
                ratios: est.ratios,
                slope: Some(est.slope).filter(|s| s.is_finite()),
                verdict: if est.quadratic { "quadratic" } else { "not_quadratic" }.into(),
                reference: None,
            },
            Err(_) => ReportRate { ratios: vec![], slope: None, verdict: "insufficient_data".into(), reference: None },
        };
        let rate = ReportRate {
            reference: trace.reference.map(|r| {
                match r {
                    ReferenceKind::Supplied => "supplied",
                    ReferenceKind::FinalIterate => "final_iterate",
                }
                .to_string()
            }),
            ..rate
        };
        let p = projector.matrix();
        RunReport {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            config,
            iterations,
            status: trace.status.as_str().into(),
            diagnostic: trace.failure.as_ref().map(|e| e.to_string()),
            rate,
            final_state: ReportFinal {
                trace: p.trace(),
                idempotence_residual: projector.idempotence_residual(),
                frobenius_norm: p.norm_fro(),
                projector: p.to_rows_f64(),
                extra_residuals,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values serialize")
    }

    pub fn status(&self) -> Option<Status> {
        [Status::Converged, Status::MaxIters, Status::SingularHessian, Status::SpectralOverlap, Status::SolverFailure]
            .into_iter()
            .find(|s| s.as_str() == self.status)
    }
}

/// Parses a report and checks the version and the closed vocabularies.
pub fn validate_report(json: &str) -> Result<RunReport, CliError> {
    let report: RunReport = serde_json::from_str(json).map_err(|e| CliError::Report(e.to_string()))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Report(format!("unsupported schema_version {:?}", report.schema_version)));
    }
    if !STATUSES.contains(&report.status.as_str()) {
        return Err(CliError::Report(format!("unknown status {:?}", report.status)));
    }
    if !VERDICTS.contains(&report.rate.verdict.as_str()) {
        return Err(CliError::Report(format!("unknown verdict {:?}", report.rate.verdict)));
    }
    if report.iterations.is_empty() || report.iterations.windows(2).any(|w| w[1].iter != w[0].iter + 1) {
        return Err(CliError::Report("iterations must be consecutive and non-empty".into()));
    }
    let n = report.config.n;
    if report.final_state.projector.len() != n || report.final_state.projector.iter().any(|r| r.len() != n) {
        return Err(CliError::Report(format!("final projector is not {n}x{n}")));
    }
    Ok(report)
}

/// Copy of the report with every timing field zeroed, for reproducibility checks.
pub fn without_timing(report: &RunReport) -> RunReport {
    let mut r = report.clone();
    for it in &mut r.iterations {
        it.elapsed_ms = 0.0;
    }
    r
}
