use std::fmt;

use adamir::analysis::{
    check_divergence_bound, check_gradient_fd, check_prox_mirror_consistency,
    check_regret_certificate, check_residual_bound, check_residual_identity,
    check_sequence_lemmas_scaled, check_step_monotone, check_three_point_identity,
    CertificateReport,
};
use adamir::problems::{
    certify_relative_continuity, fisher_problem, make_random_market, make_synthetic_rc_problem,
};
use adamir::solvers::{egd_step, pr_step};
use adamir::{
    run, BregmanGeometry, Oracle, OracleConfig, Problem, RunOptions, SolverKind, SolverSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Smaller sample counts and horizons.
    pub quick: bool,
    /// Multiplies every sequence-lemma upper bound; values below one corrupt the battery.
    pub lemma_bound_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quick: false,
            lemma_bound_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<44} {}", self.name, self.detail)
    }
}

fn outcome(name: impl Into<String>, result: adamir::Result<(bool, String)>) -> CheckOutcome {
    let name = name.into();
    match result {
        Ok((passed, detail)) => CheckOutcome {
            name,
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn certificate(name: impl Into<String>, report: adamir::Result<CertificateReport>) -> CheckOutcome {
    outcome(
        name,
        report.map(|r| {
            (
                r.passed,
                format!("t={} lhs={:.6e} rhs={:.6e}", r.t, r.lhs, r.rhs),
            )
        }),
    )
}

fn adamir_trace(
    problem: &Problem,
    config: OracleConfig,
    horizon: usize,
) -> adamir::Result<adamir::analysis::Trace> {
    let oracle = Oracle::new(problem.clone(), config)?;
    run(
        &SolverSpec::new(SolverKind::AdaMir, horizon)?,
        &oracle,
        &RunOptions::default(),
    )
}

/// Runs the full certificate battery and returns one outcome per check.
pub fn cmd_verify(options: VerifyOptions) -> Vec<CheckOutcome> {
    let samples = if options.quick { 1_000 } else { 10_000 };
    let horizon = if options.quick { 100 } else { 1_000 };
    let mut out = Vec::new();

    let geometries = [
        ("euclidean", BregmanGeometry::euclidean(5)),
        ("simplex", BregmanGeometry::simplex(5)),
        ("product-simplex", BregmanGeometry::product_simplex(4, 3)),
        ("log-barrier", BregmanGeometry::log_barrier(4)),
    ];
    for (label, g) in geometries {
        out.push(outcome(
            format!("three-point identity ({label})"),
            check_three_point_identity(&g, samples, SEED).map(|r| {
                (
                    r.max_error <= 1e-9,
                    format!("max rel err {:.3e}", r.max_error),
                )
            }),
        ));
        out.push(outcome(
            format!("prox/mirror consistency ({label})"),
            check_prox_mirror_consistency(&g, samples, SEED + 1).map(|r| {
                (
                    r.max_error <= 1e-9,
                    format!("max rel err {:.3e}", r.max_error),
                )
            }),
        ));
    }

    out.push(outcome(
        "sequence lemmas",
        check_sequence_lemmas_scaled(samples, SEED, options.lemma_bound_scale).map(|r| {
            (
                true,
                format!("{} sequences, {} comparisons", r.samples, r.comparisons),
            )
        }),
    ));

    match make_random_market(10, 4, 2.0, 8.0, SEED) {
        Ok(m) => {
            out.push(outcome(
                "RS certificate (Fisher 10x4)",
                m.rs_certificate().map(|l| (true, format!("L = {l}"))),
            ));
            out.push(outcome(
                "Fisher gradient vs finite differences",
                check_gradient_fd(
                    |b| m.objective_extended(b),
                    |b| m.gradient_extended(b),
                    &m.geometry(),
                    samples / 10,
                    1e-6,
                    SEED,
                )
                .map(|r| {
                    (
                        r.max_error <= 1e-5,
                        format!("max abs err {:.3e}", r.max_error),
                    )
                }),
            ));
        }
        Err(e) => out.push(outcome("Fisher 10x4 setup", Err(e))),
    }

    out.push(outcome("PR equals unit-step EGD", pr_vs_egd(100)));

    match fisher_problem_small() {
        Ok(fisher) => out.extend(deterministic_checks("Fisher 10x3", &fisher, horizon)),
        Err(e) => out.push(outcome("Fisher 10x3 setup", Err(e))),
    }
    match make_synthetic_rc_problem(5) {
        Ok(p) => {
            let g = p.rc_constant().expect("set at construction");
            out.push(outcome(
                "RC certificate (synthetic)",
                certify_relative_continuity(p.objective(), p.geometry(), g, samples, SEED)
                    .map(|_| (true, format!("G = {g:.6}"))),
            ));
            out.extend(deterministic_checks("synthetic RC", &p, horizon));
            out.extend(residual_bound_checks(
                &p,
                horizon,
                if options.quick { 1 } else { 3 },
            ));
        }
        Err(e) => out.push(outcome("synthetic RC setup", Err(e))),
    }
    out
}

fn fisher_problem_small() -> adamir::Result<Problem> {
    fisher_problem(make_random_market(10, 3, 2.0, 8.0, SEED)?)
}

fn pr_vs_egd(pairs: u64) -> adamir::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for k in 0..pairs {
        let market = make_random_market(8, 4, 2.0, 8.0, SEED + k)?;
        let b = market.geometry().random_point(&mut rng);
        let pr = pr_step(&market, &b)?;
        let egd = egd_step(&market, &b, 1.0)?;
        for (a, c) in pr.iter().zip(egd.iter()) {
            worst = worst.max((a - c).abs());
        }
    }
    Ok((
        worst <= 1e-12,
        format!("{pairs} pairs, max abs diff {worst:.3e}"),
    ))
}

fn deterministic_checks(label: &str, problem: &Problem, horizon: usize) -> Vec<CheckOutcome> {
    let trace = match adamir_trace(problem, OracleConfig::deterministic(), horizon) {
        Ok(t) => t,
        Err(e) => return vec![outcome(format!("{label}: run"), Err(e))],
    };
    let mut out = Vec::new();
    let mut t = 10;
    while t <= horizon {
        out.push(certificate(
            format!("{label}: regret bound T={t}"),
            check_regret_certificate(&trace, t),
        ));
        t *= 10;
    }
    out.push(certificate(
        format!("{label}: residual identity"),
        check_residual_identity(&trace),
    ));
    out.push(certificate(
        format!("{label}: divergence bound"),
        check_divergence_bound(&trace),
    ));
    out.push(certificate(
        format!("{label}: step monotone"),
        Ok(check_step_monotone(&trace)),
    ));
    out
}

fn residual_bound_checks(problem: &Problem, horizon: usize, seeds: u64) -> Vec<CheckOutcome> {
    let g = problem.rc_constant().expect("set at construction");
    let k = problem.geometry().modulus();
    let mut out = Vec::new();
    for sigma in [0.0, 0.1, 1.0] {
        let bound = (2f64.sqrt() * g + (2.0 / k).sqrt() * sigma).powi(2);
        let mut worst: Option<CertificateReport> = None;
        let mut error = None;
        for seed in 1..=seeds {
            let config = if sigma == 0.0 {
                OracleConfig::deterministic()
            } else {
                OracleConfig::sphere_uniform(sigma, seed)
            };
            match adamir_trace(problem, config, horizon) {
                Ok(trace) => {
                    let r = check_residual_bound(&trace, bound);
                    if worst.as_ref().is_none_or(|w| r.lhs > w.lhs) {
                        worst = Some(r);
                    }
                }
                Err(e) => error = Some(e),
            }
        }
        let name = format!("synthetic RC: residual bound sigma={sigma}");
        out.push(match error {
            Some(e) => outcome(name, Err(e)),
            None => certificate(name, Ok(worst.expect("at least one seed"))),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_battery_passes() {
        let results = cmd_verify(VerifyOptions {
            quick: true,
            ..VerifyOptions::default()
        });
        let failed: Vec<_> = results.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn corrupted_lemma_bound_fails_only_that_check() {
        let results = cmd_verify(VerifyOptions {
            quick: true,
            lemma_bound_scale: 0.5,
        });
        let failed: Vec<_> = results
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failed, ["sequence lemmas"]);
    }
}
