//! Seeded property suites over a grid of sizes.

use std::fmt::Write as _;

use super::CliError;
use crate::grassmann::{
    chart, chart_second_derivative, chart_second_derivative_check, distance, distance_from_complement,
    distance_from_overlap, geodesic, random_projector, tangent_project, ChartId, OrthoFrame, Projector,
};
use crate::lagrange::{lg_chart, random_lag_projector};
use crate::linalg::Matrix;
use crate::random;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub seeds: usize,
    /// Corrupts the tangent projection so the harness can be seen to fail.
    pub inject_fault: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { sizes: vec![2, 3, 4, 5, 6, 8, 10, 12], seed: 0, seeds: 3, inject_fault: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub threshold: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.threshold
    }
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self { result: SuiteResult { name, cases: 0, max_residual: 0.0, threshold } }
    }

    fn record(&mut self, residual: f64) {
        self.result.cases += 1;
        // NaN must fail the suite
        if !(residual <= self.result.max_residual) {
            self.result.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }
}

fn case_seed(base: u64, n: usize, m: usize, s: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add(((n * 100 + m) * 100 + s) as u64)
}

fn unit_param(rng: &mut impl rand::Rng, rows: usize, cols: usize, norm: f64) -> Matrix<f64> {
    let z: Matrix<f64> = random::gaussian(rng, rows, cols);
    z.scale(norm / z.norm_fro())
}

/// Runs every suite and returns one result per suite.
pub fn run_check(opts: &CheckOptions) -> std::result::Result<Vec<SuiteResult>, CliError> {
    if opts.sizes.is_empty() || opts.sizes.iter().any(|&n| n < 2) {
        return Err(CliError::InvalidArgument("--sizes needs values of at least 2".into()));
    }
    if opts.seeds == 0 {
        return Err(CliError::InvalidArgument("--seeds must be at least 1".into()));
    }
    let mut projection = Suite::new("tangent_projection", 1e-10);
    let mut metric = Suite::new("metric_equality", 1e-10);
    let mut geodesic_ode = Suite::new("geodesic_ode", 1e-6);
    let mut validity = Suite::new("chart_validity", 1e-10);
    let mut first = Suite::new("chart_first_derivative", 1e-6);
    let mut second = Suite::new("chart_second_derivative", 1e-4);
    let mut dist = Suite::new("distance_formulas", 1e-9);
    let mut lagrangian = Suite::new("lagrangian_charts", 1e-10);

    for &n in &opts.sizes {
        for m in 1..n {
            for s in 0..opts.seeds {
                let seed = case_seed(opts.seed, n, m, s);
                let (p, frame) = random_projector::<f64>(n, m, seed)?;
                let mut rng = random::rng(seed ^ 0x9e37_79b9);
                projection.record(projection_case(&p, &mut rng, opts.inject_fault)?);
                metric.record(metric_case(&p, &frame, &mut rng)?);
                geodesic_ode.record(geodesic_case(&p, &frame, &mut rng)?);
                let (v, f1, f2) = chart_case(&frame, &mut rng)?;
                validity.record(v);
                first.record(f1);
                second.record(f2);
                let (q, _) = random_projector::<f64>(n, m, seed.wrapping_add(7))?;
                dist.record(distance_case(&p, &q)?);
            }
        }
        if n % 2 == 0 {
            for s in 0..opts.seeds {
                lagrangian.record(lagrangian_case(n / 2, case_seed(opts.seed, n, 0, s))?);
            }
        }
    }
    Ok([projection, metric, geodesic_ode, validity, first, second, dist, lagrangian].into_iter().map(|s| s.result).collect())
}

/// Idempotence, self-adjointness and the orthogonal split.
fn projection_case(p: &Projector<f64>, rng: &mut impl rand::Rng, fault: bool) -> Result<f64> {
    let n = p.dim();
    let (x, y): (Matrix<f64>, Matrix<f64>) = (random::symmetric(rng, n), random::symmetric(rng, n));
    let mut px = tangent_project(p, &x)?;
    if fault {
        px[(0, 0)] += 1e-6;
    }
    let idem = (&tangent_project(p, &px)? - &px).max_abs();
    let adjoint = (px.inner(&y) - x.inner(&tangent_project(p, &y)?)).abs();
    let split = px.inner(&(&x - &px)).abs();
    Ok(idem.max(adjoint).max(split))
}

/// `tr(ξ₁ξ₂) = tr(Ω₁ᵀΩ₂)` with `Ωᵢ = [ξᵢ, P]`.
fn metric_case(p: &Projector<f64>, frame: &OrthoFrame<f64>, rng: &mut impl rand::Rng) -> Result<f64> {
    let (n, m) = (frame.dim(), frame.rank());
    let xi1 = frame.tangent(&random::gaussian(rng, m, n - m))?;
    let xi2 = frame.tangent(&random::gaussian(rng, m, n - m))?;
    let o1 = xi1.commutator(p.matrix());
    let o2 = xi2.commutator(p.matrix());
    Ok((xi1.inner(&xi2) - o1.inner(&o2)).abs())
}

/// `‖P̈ + [Ṗ, [Ṗ, P]]‖` by central differences with `h = 1e−3`.
fn geodesic_case(p: &Projector<f64>, frame: &OrthoFrame<f64>, rng: &mut impl rand::Rng) -> Result<f64> {
    let (n, m) = (frame.dim(), frame.rank());
    let xi = frame.tangent(&unit_param(rng, m, n - m, 0.5))?;
    let (t, h) = (0.3, 1e-3);
    let at = |s: f64| geodesic(p, &xi, s).map(|q| q.into_matrix());
    let (pm, p0, pp) = (at(t - h)?, at(t)?, at(t + h)?);
    let vel = (&pp - &pm).scale(0.5 / h);
    let acc = (&(&pp - &p0.scale(2.0)) + &pm).scale(1.0 / (h * h));
    Ok((&acc + &vel.commutator(&vel.commutator(&p0))).max_abs())
}

/// Projector validity at a finite parameter, first derivative at 0 and the
/// shared second derivative, maximized over the three charts.
fn chart_case(frame: &OrthoFrame<f64>, rng: &mut impl rand::Rng) -> Result<(f64, f64, f64)> {
    let (n, m) = (frame.dim(), frame.rank());
    let z = unit_param(rng, m, n - m, 1.0);
    let tangent = frame.tangent(&z)?;
    let closed = chart_second_derivative(frame, &z)?;
    let h = 1e-4;
    let (mut v, mut f1, mut f2) = (0.0f64, 0.0f64, 0.0f64);
    for id in ChartId::ALL {
        let q = chart(frame, id, &z.scale(0.5))?;
        let sym = q.matrix().symmetry_residual();
        v = v.max(q.idempotence_residual()).max(q.trace_residual().abs()).max(sym);
        let fwd = chart(frame, id, &z.scale(h))?.into_matrix();
        let back = chart(frame, id, &z.scale(-h))?.into_matrix();
        f1 = f1.max((&(&fwd - &back).scale(0.5 / h) - &tangent).max_abs());
        f2 = f2.max((&chart_second_derivative_check(frame, &z, id)? - &closed).max_abs());
    }
    Ok((v, f1, f2))
}

/// Overlap and complement eigenvalue formulas against the angle form, and symmetry.
fn distance_case(p: &Projector<f64>, q: &Projector<f64>) -> Result<f64> {
    let d = distance(p, q)?;
    let by_overlap = distance_from_overlap(p, q)?;
    let by_complement = distance_from_complement(p, q)?;
    let sym = distance(q, p)?;
    Ok((by_overlap - by_complement).abs().max((d - sym).abs()).max((d - by_overlap).abs()))
}

/// Every chart image on `LG(n)` is a Lagrangian projector.
fn lagrangian_case(half: usize, seed: u64) -> Result<f64> {
    let (_, frame) = random_lag_projector::<f64>(half, seed)?;
    let z: Matrix<f64> = random::symmetric(&mut random::rng(seed ^ 0x51), half);
    let mut worst = 0.0f64;
    for id in ChartId::ALL {
        let q = lg_chart(&frame, id, &z.scale(0.5 / z.norm_fro()))?;
        worst = worst.max(q.lagrangian_residual()).max(q.as_projector().idempotence_residual());
        let pushed = frame.push(id, &z)?;
        worst = worst.max(pushed.symplecticity_residual()).max(pushed.orthogonality_residual());
    }
    Ok(worst)
}

/// Table with one line per suite.
pub fn format_results(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<26} {:>6} {:>14} {:>10}  result", "suite", "cases", "max residual", "threshold");
    for r in results {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{:<26} {:>6} {:>14.3e} {:>10.0e}  {verdict}",
            r.name, r.cases, r.max_residual, r.threshold
        );
    }
    out
}
