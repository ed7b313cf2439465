use std::io::{Read, Write};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the trace CSV.
pub const CSV_HEADER: [&str; 7] = [
    "t",
    "f_last",
    "f_avg",
    "gamma",
    "rho_sq",
    "div_to_opt",
    "wallclock_ns",
];

/// Telemetry for one iteration `t`: the iterate `X_t`, the running average, and the step taken from `X_t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TraceRecord {
    pub t: usize,
    /// `f(X_t)`
    pub f_last: f64,
    /// `f(x̄_t)` with `x̄_t = (1/t) Σ_{s ≤ t} X_s`
    pub f_avg: f64,
    /// Step size used to move from `X_t` to `X_{t+1}`.
    pub gamma: f64,
    /// `ρ_t² = [D(X_t, X_{t+1}) + D(X_{t+1}, X_t)] / γ_t²`
    pub rho_sq: f64,
    /// `D(x*, X_t)` when an optimum is known.
    pub div_to_opt: Option<f64>,
    pub wallclock_ns: u64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Trace {
    /// Solver shorthand, e.g. `adamir` or `egd:0.1`.
    pub solver: String,
    pub records: Vec<TraceRecord>,
    /// `min f`, when known.
    pub optimum_value: Option<f64>,
    /// `ρ₀² = D(X₀, X₁) + D(X₁, X₀)` for adaptive runs.
    pub rho0_sq: Option<f64>,
    /// Set when the run aborted; `records` then holds the completed prefix.
    pub failure: Option<String>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// The record of iteration `t` (1-based).
    pub fn at(&self, t: usize) -> Option<&TraceRecord> {
        t.checked_sub(1).and_then(|i| self.records.get(i))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_records_csv(&self.records, writer)
    }

    /// Parses trace records, rejecting anything that deviates from the schema
    /// or violates the record invariants.
    pub fn read_csv<R: Read>(reader: R) -> Result<Trace> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::Parse(format!(
                "unexpected trace header {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        let mut records: Vec<TraceRecord> = Vec::new();
        for row in rdr.deserialize() {
            let rec: TraceRecord = row?;
            if let Some(prev) = records.last() {
                if rec.t <= prev.t {
                    return Err(Error::Parse(format!(
                        "iteration index {} does not increase after {}",
                        rec.t, prev.t
                    )));
                }
            }
            if !(rec.gamma > 0.0) || !(rec.rho_sq >= 0.0) {
                return Err(Error::Parse(format!(
                    "record t = {} has gamma = {} and rho_sq = {}",
                    rec.t, rec.gamma, rec.rho_sq
                )));
            }
            records.push(rec);
        }
        Ok(Trace {
            records,
            ..Trace::default()
        })
    }
}

pub fn write_records_csv<W: Write>(records: &[TraceRecord], writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    wtr.write_record(CSV_HEADER)?;
    for rec in records {
        wtr.serialize(rec)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: usize, div: Option<f64>) -> TraceRecord {
        TraceRecord {
            t,
            f_last: 1.0 / t as f64,
            f_avg: 0.1 + 1.0 / t as f64,
            gamma: 0.5,
            rho_sq: 1e-3 * t as f64,
            div_to_opt: div,
            wallclock_ns: 0,
        }
    }

    #[test]
    fn csv_schema_and_empty_optional_column() {
        let trace = Trace {
            records: vec![record(1, Some(0.25)), record(2, None)],
            ..Trace::default()
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns")
        );
        assert_eq!(lines.next(), Some("1,1.0,1.1,0.5,0.001,0.25,0"));
        assert_eq!(lines.next(), Some("2,0.5,0.6,0.5,0.002,,0"));
        let back = Trace::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.records, trace.records);
    }

    #[test]
    fn read_rejects_schema_violations() {
        let wrong_header = "t,f_last\n1,2\n";
        assert!(matches!(
            Trace::read_csv(wrong_header.as_bytes()),
            Err(Error::Parse(_))
        ));
        let non_increasing =
            "t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns\n2,1,1,1,0,,0\n2,1,1,1,0,,0\n";
        assert!(matches!(
            Trace::read_csv(non_increasing.as_bytes()),
            Err(Error::Parse(_))
        ));
        let bad_gamma = "t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns\n1,1,1,0,0,,0\n";
        assert!(matches!(
            Trace::read_csv(bad_gamma.as_bytes()),
            Err(Error::Parse(_))
        ));
        let garbage = "t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns\n1,x,1,1,0,,0\n";
        assert!(Trace::read_csv(garbage.as_bytes()).is_err());
    }

    #[test]
    fn at_is_one_based() {
        let trace = Trace {
            records: vec![record(1, None), record(2, None)],
            ..Trace::default()
        };
        assert_eq!(trace.at(2).unwrap().t, 2);
        assert!(trace.at(0).is_none());
        assert!(trace.at(3).is_none());
    }
}
