use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::certificates::{
    check_divergence_bound, check_regret_certificate, check_residual_identity, check_step_monotone,
    CertificateReport,
};
use super::rates::{fit_rate, GapField, RateFit};
use super::trace::Trace;

/// Run metadata carried into the JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RunMeta {
    pub problem: String,
    pub seed: u64,
    pub sigma: f64,
    pub deterministic: bool,
    pub horizon: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FinalValues {
    pub t: usize,
    pub f_last: f64,
    pub f_avg: f64,
    pub f_last_gap: Option<f64>,
    pub f_avg_gap: Option<f64>,
    pub div_to_opt: Option<f64>,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FieldFit {
    pub field: GapField,
    pub fit: Option<RateFit>,
    /// Why no fit was produced.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RunSummary {
    pub solver: String,
    #[serde(flatten)]
    pub meta: RunMeta,
    pub completed: usize,
    pub optimum_value: Option<f64>,
    pub rho0_sq: Option<f64>,
    pub final_values: Option<FinalValues>,
    pub rate_fits: Vec<FieldFit>,
    pub certificates: Vec<CertificateReport>,
    pub failure: Option<String>,
}

/// Collects final gaps, default-window rate fits and the applicable certificates of one run.
///
/// The regret, divergence and identity checks only apply to deterministic adaptive runs
/// with a known optimum and are skipped otherwise.
pub fn summarize_run(trace: &Trace, meta: RunMeta) -> RunSummary {
    let final_values = trace.last().map(|r| FinalValues {
        t: r.t,
        f_last: r.f_last,
        f_avg: r.f_avg,
        f_last_gap: trace.optimum_value.map(|v| r.f_last - v),
        f_avg_gap: trace.optimum_value.map(|v| r.f_avg - v),
        div_to_opt: r.div_to_opt,
        gamma: r.gamma,
    });

    let rate_fits = [GapField::FAvgGap, GapField::FLastGap, GapField::DivToOpt]
        .into_iter()
        .map(|field| match fit_rate(trace, field, None) {
            Ok(fit) => FieldFit {
                field,
                fit: Some(fit),
                note: None,
            },
            Err(e) => FieldFit {
                field,
                fit: None,
                note: Some(e.to_string()),
            },
        })
        .collect();

    let mut certificates = Vec::new();
    if !trace.is_empty() {
        certificates.push(check_step_monotone(trace));
        if meta.deterministic && trace.rho0_sq.is_some() {
            certificates.extend(check_residual_identity(trace).ok());
            certificates.extend(check_regret_certificate(trace, trace.len()).ok());
            certificates.extend(check_divergence_bound(trace).ok());
        }
    }

    RunSummary {
        solver: trace.solver.clone(),
        meta,
        completed: trace.len(),
        optimum_value: trace.optimum_value,
        rho0_sq: trace.rho0_sq,
        final_values,
        rate_fits,
        certificates,
        failure: trace.failure.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Oracle;
    use crate::problems::make_synthetic_rc_problem;
    use crate::solvers::{run, RunOptions, SolverSpec};

    fn meta(deterministic: bool, horizon: usize) -> RunMeta {
        RunMeta {
            problem: "synthetic-rc-3".into(),
            seed: 1,
            sigma: 0.0,
            deterministic,
            horizon,
        }
    }

    #[test]
    fn deterministic_adamir_summary_has_all_certificates() {
        let oracle = Oracle::deterministic(make_synthetic_rc_problem(3).unwrap());
        let spec = SolverSpec::new("adamir".parse().unwrap(), 100).unwrap();
        let trace = run(&spec, &oracle, &RunOptions::default()).unwrap();
        let summary = summarize_run(&trace, meta(true, 100));
        let names: Vec<_> = summary
            .certificates
            .iter()
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(
            names,
            [
                "step-monotone",
                "residual-identity",
                "regret",
                "divergence-bound"
            ]
        );
        assert!(summary.certificates.iter().all(|c| c.passed));
        assert_eq!(summary.completed, 100);
        let json = serde_json::to_value(&summary).unwrap();
        assert_eq!(json["problem"], "synthetic-rc-3");
        assert_eq!(json["solver"], "adamir");
    }

    #[test]
    fn baseline_summary_skips_adaptive_checks() {
        let oracle = Oracle::deterministic(make_synthetic_rc_problem(3).unwrap());
        let spec = SolverSpec::new("egd:0.1".parse().unwrap(), 1).unwrap();
        let trace = run(&spec, &oracle, &RunOptions::default()).unwrap();
        let summary = summarize_run(&trace, meta(true, 1));
        assert_eq!(summary.certificates.len(), 1);
        assert!(summary.rate_fits.iter().all(|f| f.fit.is_none()));
    }
}
