use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::trace::Trace;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Per-iteration mean and 95% half-width of one quantity across seeds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
}

impl MeanCi {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let half_width = if values.len() < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Z_95 * (var / n).sqrt()
        };
        Self { mean, half_width }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SeedStatsRow {
    pub t: usize,
    pub f_avg: MeanCi,
    pub f_last: MeanCi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct MultiSeedStats {
    pub solver: String,
    pub seeds: usize,
    pub optimum_value: Option<f64>,
    pub rows: Vec<SeedStatsRow>,
}

/// Pointwise mean and normal-approximation 95% interval of `f_avg` and `f_last` across traces.
///
/// A single trace yields its own values with zero-width intervals.
pub fn summarize_multiseed(traces: &[Trace]) -> Result<MultiSeedStats> {
    let first = traces
        .first()
        .ok_or_else(|| Error::InvalidArgument("no traces to summarize".into()))?;
    for other in &traces[1..] {
        if other.len() != first.len() {
            return Err(Error::MismatchedHorizons {
                first: first.len(),
                other: other.len(),
            });
        }
    }
    let mut f_avg = vec![0.0; traces.len()];
    let mut f_last = vec![0.0; traces.len()];
    let rows = (0..first.len())
        .map(|i| {
            for (k, trace) in traces.iter().enumerate() {
                f_avg[k] = trace.records[i].f_avg;
                f_last[k] = trace.records[i].f_last;
            }
            SeedStatsRow {
                t: first.records[i].t,
                f_avg: MeanCi::of(&f_avg),
                f_last: MeanCi::of(&f_last),
            }
        })
        .collect();
    Ok(MultiSeedStats {
        solver: first.solver.clone(),
        seeds: traces.len(),
        optimum_value: first.optimum_value,
        rows,
    })
}
