//! Runtime checks of the convergence certificates along recorded runs.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::trace::Trace;
use crate::error::{Error, Result};

/// Absolute slack of the regret and divergence checks, scaled by `1 + |rhs|`.
pub const CERTIFICATE_SLACK: f64 = 1e-6;
/// Relative tolerance of the residual identity.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Absolute slack of the residual bound.
pub const RESIDUAL_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CertificateReport {
    pub name: String,
    /// Horizon, or the iteration of the tightest comparison.
    pub t: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

fn prefix(trace: &Trace, horizon: usize) -> Result<&[super::TraceRecord]> {
    if horizon == 0 || horizon > trace.len() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} outside the recorded 1..={}",
            trace.len()
        )));
    }
    Ok(&trace.records[..horizon])
}

/// The regret bound of adaptive mirror descent at horizon `T`:
///
/// `Σ_{t≤T} [f(X_t) − f*] ≤ D(x*, X₁)/γ_T + Σ_{t≤T} γ_t² ρ_t² / γ_T + Σ_{t≤T} γ_t ρ_t²`.
///
/// `D(x*, X₁)` is read from the first record.
pub fn check_regret_certificate(trace: &Trace, horizon: usize) -> Result<CertificateReport> {
    let records = prefix(trace, horizon)?;
    let f_star = trace.optimum_value.ok_or(Error::MissingOptimum)?;
    let d1 = records[0].div_to_opt.ok_or(Error::MissingOptimum)?;
    let gamma_t = records[horizon - 1].gamma;
    let lhs: f64 = records.iter().map(|r| r.f_last - f_star).sum();
    let sq: f64 = records.iter().map(|r| r.gamma * r.gamma * r.rho_sq).sum();
    let lin: f64 = records.iter().map(|r| r.gamma * r.rho_sq).sum();
    let rhs = d1 / gamma_t + sq / gamma_t + lin;
    Ok(CertificateReport {
        name: "regret".into(),
        t: horizon,
        lhs,
        rhs,
        passed: lhs <= rhs + CERTIFICATE_SLACK * (1.0 + rhs.abs()),
    })
}

/// `1/γ_t² = ρ₀² + Σ_{s<t} ρ_s²` at every recorded `t`; reports the worst relative error.
pub fn check_residual_identity(trace: &Trace) -> Result<CertificateReport> {
    let rho0 = trace.rho0_sq.ok_or_else(|| {
        Error::InvalidArgument("the residual identity needs an adaptive trace with rho0_sq".into())
    })?;
    let mut running = rho0;
    let mut worst = (0usize, 0.0_f64, 0.0_f64, 0.0_f64);
    for r in &trace.records {
        let lhs = (r.gamma * r.gamma).recip();
        let rel = (lhs - running).abs() / running.abs().max(f64::MIN_POSITIVE);
        if rel >= worst.3 {
            worst = (r.t, lhs, running, rel);
        }
        running += r.rho_sq;
    }
    Ok(CertificateReport {
        name: "residual-identity".into(),
        t: worst.0,
        lhs: worst.1,
        rhs: worst.2,
        passed: worst.3 <= IDENTITY_TOL,
    })
}

/// `D(x*, X_t) ≤ D(x*, X₁) + Σ_{s<t} γ_s² ρ_s²` for every recorded `t`.
///
/// Reports the comparison with the smallest margin.
pub fn check_divergence_bound(trace: &Trace) -> Result<CertificateReport> {
    let first = trace
        .records
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty trace".into()))?;
    let d1 = first.div_to_opt.ok_or(Error::MissingOptimum)?;
    let mut budget = d1;
    let mut worst: Option<(usize, f64, f64)> = None;
    let mut passed = true;
    for r in &trace.records {
        let d = r.div_to_opt.ok_or(Error::MissingOptimum)?;
        passed &= d <= budget + CERTIFICATE_SLACK * (1.0 + budget.abs());
        if worst.is_none_or(|(_, l, b)| b - d < b - l) {
            worst = Some((r.t, d, budget));
        }
        budget += r.gamma * r.gamma * r.rho_sq;
    }
    let (t, lhs, rhs) = worst.expect("nonempty trace");
    Ok(CertificateReport {
        name: "divergence-bound".into(),
        t,
        lhs,
        rhs,
        passed,
    })
}

/// `ρ_t² ≤ bound` for every recorded `t`; reports the largest residual.
pub fn check_residual_bound(trace: &Trace, bound: f64) -> CertificateReport {
    let (t, lhs) =
        trace
            .records
            .iter()
            .map(|r| (r.t, r.rho_sq))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    CertificateReport {
        name: "residual-bound".into(),
        t,
        lhs,
        rhs: bound,
        passed: trace.is_empty() || lhs <= bound + RESIDUAL_SLACK,
    }
}

/// `γ_{t+1} ≤ γ_t` along the whole trace; reports the largest increase.
pub fn check_step_monotone(trace: &Trace) -> CertificateReport {
    let mut worst = (0usize, 0.0_f64, 0.0_f64);
    let mut increase = f64::NEG_INFINITY;
    for w in trace.records.windows(2) {
        let d = w[1].gamma - w[0].gamma;
        if d > increase {
            increase = d;
            worst = (w[1].t, w[1].gamma, w[0].gamma);
        }
    }
    CertificateReport {
        name: "step-monotone".into(),
        t: worst.0,
        lhs: worst.1,
        rhs: worst.2,
        passed: increase <= 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Oracle;
    use crate::problems::{fisher_problem, make_random_market, make_synthetic_rc_problem};
    use crate::solvers::{run, RunOptions, SolverKind, SolverSpec};

    fn adamir_trace(problem: crate::problems::Problem, horizon: usize) -> Trace {
        let oracle = Oracle::deterministic(problem);
        let spec = SolverSpec::new(SolverKind::AdaMir, horizon).unwrap();
        run(&spec, &oracle, &RunOptions::default()).unwrap()
    }

    #[test]
    fn single_step_regret() {
        let trace = adamir_trace(make_synthetic_rc_problem(3).unwrap(), 1);
        let r = &trace.records[0];
        let report = check_regret_certificate(&trace, 1).unwrap();
        assert!((r.gamma - trace.rho0_sq.unwrap().sqrt().recip()).abs() < 1e-15);
        assert_eq!(report.lhs, r.f_last - trace.optimum_value.unwrap());
        assert!(report.passed);
    }

    #[test]
    fn certificates_hold_on_small_runs() {
        let market = fisher_problem(make_random_market(6, 3, 2.0, 8.0, 5).unwrap()).unwrap();
        for problem in [market, make_synthetic_rc_problem(4).unwrap()] {
            let trace = adamir_trace(problem, 300);
            for t in [1, 10, 100, 300] {
                assert!(check_regret_certificate(&trace, t).unwrap().passed);
            }
            assert!(check_residual_identity(&trace).unwrap().passed);
            assert!(check_divergence_bound(&trace).unwrap().passed);
            assert!(check_step_monotone(&trace).passed);
        }
    }

    #[test]
    fn corrupted_residuals_are_detected() {
        let problem = make_synthetic_rc_problem(5).unwrap();
        let trace = adamir_trace(problem, 1_000);
        let corrupt = |factor: f64| {
            let mut t = trace.clone();
            for r in &mut t.records {
                r.rho_sq *= factor;
            }
            t
        };
        // Halving the residuals leaves the regret bound loose but breaks the step identity.
        let halved = corrupt(0.5);
        assert!(!check_residual_identity(&halved).unwrap().passed);
        assert!(check_regret_certificate(&halved, 1_000).unwrap().passed);
        let shrunk = corrupt(0.01);
        assert!(!check_regret_certificate(&shrunk, 1_000).unwrap().passed);
    }

    #[test]
    fn regret_needs_an_optimum() {
        let mut trace = adamir_trace(make_synthetic_rc_problem(3).unwrap(), 5);
        trace.optimum_value = None;
        assert!(matches!(
            check_regret_certificate(&trace, 5),
            Err(Error::MissingOptimum)
        ));
        assert!(check_regret_certificate(&trace, 6).is_err());
    }

    #[test]
    fn residual_bound_reports_the_maximum() {
        let trace = adamir_trace(make_synthetic_rc_problem(3).unwrap(), 50);
        let max = trace.records.iter().map(|r| r.rho_sq).fold(0.0, f64::max);
        let report = check_residual_bound(&trace, 4.0);
        assert_eq!(report.lhs, max);
        assert!(report.passed);
        assert!(!check_residual_bound(&trace, max / 2.0 - 1.0).passed);
    }
}
