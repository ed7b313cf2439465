use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::trace::Trace;
use crate::error::{Error, Result};

/// Gaps at or below this value are past float resolution and cannot enter a log-log fit.
pub const CONVERGED_GAP: f64 = 1e-15;

/// Which suboptimality measure to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum GapField {
    /// `f(x̄_t) − min f`
    FAvgGap,
    /// `f(X_t) − min f`
    FLastGap,
    /// `D(x*, X_t)`
    DivToOpt,
}

/// Least-squares line through `(ln t, ln gap)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Inclusive iteration range `(t_lo, t_hi)`.
    pub window: (usize, usize),
}

/// The default window drops the first 10% of the run as burn-in.
pub fn default_window(horizon: usize) -> (usize, usize) {
    (horizon / 10 + 1, horizon)
}

/// The gap series of `field`, one value per record.
pub fn gap_series(trace: &Trace, field: GapField) -> Result<Vec<(usize, f64)>> {
    trace
        .records
        .iter()
        .map(|r| {
            let gap = match field {
                GapField::FAvgGap => r.f_avg - trace.optimum_value.ok_or(Error::MissingOptimum)?,
                GapField::FLastGap => {
                    r.f_last - trace.optimum_value.ok_or(Error::MissingOptimum)?
                }
                GapField::DivToOpt => r.div_to_opt.ok_or(Error::MissingOptimum)?,
            };
            Ok((r.t, gap))
        })
        .collect()
}

/// Fits `ln gap ≈ slope · ln t + intercept` over `window`, or over
/// [`default_window`] when `window` is `None`.
pub fn fit_rate(trace: &Trace, field: GapField, window: Option<(usize, usize)>) -> Result<RateFit> {
    fit_series(&gap_series(trace, field)?, window)
}

/// As [`fit_rate`] for an arbitrary `(t, gap)` series ordered by `t`, such as a
/// mean over seeds.
pub fn fit_series(series: &[(usize, f64)], window: Option<(usize, usize)>) -> Result<RateFit> {
    let horizon = series.last().map_or(0, |p| p.0);
    let (lo, hi) = window.unwrap_or_else(|| default_window(horizon));
    if lo == 0 || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "fit window ({lo}, {hi}) must satisfy 1 <= t_lo < t_hi"
        )));
    }
    if hi > horizon {
        return Err(Error::InvalidArgument(format!(
            "fit window ends at {hi} but the series stops at {horizon}"
        )));
    }
    let mut points = Vec::new();
    for &(t, gap) in series {
        if t < lo || t > hi {
            continue;
        }
        if !(gap > CONVERGED_GAP) {
            return Err(Error::NonPositiveGap { t, gap });
        }
        points.push(((t as f64).ln(), gap.ln()));
    }
    let (slope, intercept, r_squared) = least_squares(&points)?;
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        window: (lo, hi),
    })
}

fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "a rate fit needs at least two points".into(),
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok((slope, intercept, r_squared))
}
