//! Empirical convergence-order check on an error sequence.

use super::{NewtonTrace, ReferenceKind};
use crate::error::{Error, Result};

/// Entries needed for two consecutive ratios.
const WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticRateEstimate {
    /// `e_{k+1} / e_k²` over the window.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log e_{k+1}` against `log e_k` over the window.
    pub slope: f64,
    pub quadratic: bool,
    /// The error entries the estimate was computed from.
    pub window: Vec<f64>,
}

/// [`estimate_quadratic_rate_with`] at a floor of `10ε`.
pub fn estimate_quadratic_rate(errors: &[f64]) -> Result<QuadraticRateEstimate> {
    estimate_quadratic_rate_with(errors, 10.0 * f64::EPSILON)
}

/// Rate estimate from the last three entries of the strictly decreasing run
/// of errors above `floor` with the largest overall decrease. The verdict is quadratic when the
/// slope is at least 1.7 and the ratio does not grow by a factor of 10 or
/// more; a falling ratio means faster than quadratic and is accepted.
pub fn estimate_quadratic_rate_with(errors: &[f64], floor: f64) -> Result<QuadraticRateEstimate> {
    let mut runs: Vec<&[f64]> = Vec::new();
    let mut start = 0;
    for i in 0..=errors.len() {
        let breaks = i == errors.len() || !(errors[i] > floor) || (i > start && errors[i] >= errors[i - 1]);
        if breaks {
            if i > start {
                runs.push(&errors[start..i]);
            }
            start = if i < errors.len() && errors[i] > floor { i } else { i + 1 };
        }
    }
    // the convergent phase spans many orders of magnitude, roundoff plateaus do not
    let drop = |r: &&&[f64]| r[0].ln() - r[r.len() - 1].ln();
    let Some(run) = runs.iter().filter(|r| r.len() >= WINDOW).max_by(|a, b| drop(a).total_cmp(&drop(b))) else {
        let have = runs.iter().map(|r| r.len()).max().unwrap_or(0);
        return Err(Error::InsufficientData { have, need: WINDOW });
    };
    let window = &run[run.len() - WINDOW..];
    let ratios: Vec<f64> = window.windows(2).map(|w| w[1] / (w[0] * w[0])).collect();
    let points: Vec<(f64, f64)> = window.windows(2).map(|w| (w[0].ln(), w[1].ln())).collect();
    let slope = least_squares_slope(&points);
    let quadratic = slope >= 1.7 && ratios.windows(2).all(|r| r[1] < 10.0 * r[0]);
    Ok(QuadraticRateEstimate { ratios, slope, quadratic, window: window.to_vec() })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Rate estimate from the distances recorded in a trace. Distances to the
/// final iterate lose their last two entries.
pub fn rate_from_trace(trace: &NewtonTrace) -> Result<QuadraticRateEstimate> {
    let mut errors = trace.distances().ok_or(Error::InsufficientData { have: 0, need: WINDOW })?;
    if trace.reference == Some(ReferenceKind::FinalIterate) {
        errors.truncate(errors.len().saturating_sub(2));
    }
    estimate_quadratic_rate(&errors)
}
