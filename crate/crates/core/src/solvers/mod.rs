//! AdaMir and its baselines, plus the driver that turns a run into a [`Trace`].

mod adamir;
mod market;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::geometry::{DualVector, Point};
use crate::oracle::Oracle;

pub use adamir::{AdaMirState, StepOutcome, DEGENERATE_INIT_TOL};
pub use market::{egd_step, pr_step};

/// Step used for the prox step that produces AdaMir's second initial point.
pub const DEFAULT_GAMMA_INIT: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverKind {
    AdaMir,
    /// Mirror descent with a constant step (EGD on the simplex).
    FixedMd {
        gamma: f64,
    },
    ProportionalResponse,
    /// Mirror descent with `γ_t = γ₀ / √t`.
    DecayedMd {
        gamma0: f64,
    },
}

impl SolverKind {
    /// A filesystem-friendly name, e.g. `egd-0.1`.
    pub fn label(&self) -> String {
        self.to_string().replace(':', "-")
    }

    fn validate(&self) -> Result<()> {
        let step = match *self {
            SolverKind::FixedMd { gamma } => gamma,
            SolverKind::DecayedMd { gamma0 } => gamma0,
            _ => return Ok(()),
        };
        if step.is_finite() && step > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "solver step must be positive and finite, got {step}"
            )))
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::AdaMir => f.write_str("adamir"),
            SolverKind::ProportionalResponse => f.write_str("pr"),
            SolverKind::FixedMd { gamma } => write!(f, "egd:{gamma}"),
            SolverKind::DecayedMd { gamma0 } => write!(f, "md-decay:{gamma0}"),
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    /// Parses `adamir | pr | egd:<gamma> | md-decay:<gamma0>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = match s.split_once(':') {
            None if s == "adamir" => SolverKind::AdaMir,
            None if s == "pr" => SolverKind::ProportionalResponse,
            Some((name, arg)) if name == "egd" || name == "md-decay" => {
                let value: f64 = arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad step size {arg:?} in solver {s:?}")))?;
                if name == "egd" {
                    SolverKind::FixedMd { gamma: value }
                } else {
                    SolverKind::DecayedMd { gamma0: value }
                }
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unknown solver {s:?}; expected adamir, pr, egd:<gamma> or md-decay:<gamma0>"
                )))
            }
        };
        kind.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub horizon: usize,
}

impl SolverSpec {
    pub fn new(kind: SolverKind, horizon: usize) -> Result<Self> {
        kind.validate()?;
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        Ok(Self { kind, horizon })
    }
}

/// How AdaMir obtains `X₁` from `X₀`.
#[derive(Clone, Debug, PartialEq)]
pub enum SecondPoint {
    /// `X₁ = P_{X₀}(−γ_init g(X₀))`.
    ProxStep {
        gamma_init: f64,
    },
    Explicit(Point),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitPolicy {
    /// Starting point; the barycenter of the geometry when unset.
    pub start: Option<Point>,
    pub second: SecondPoint,
}

impl Default for InitPolicy {
    fn default() -> Self {
        Self {
            start: None,
            second: SecondPoint::ProxStep {
                gamma_init: DEFAULT_GAMMA_INIT,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub init: InitPolicy,
    /// Record elapsed time per iteration. Off by default so that traces are reproducible byte for byte.
    pub record_wallclock: bool,
}

enum Driver {
    Ada(AdaMirState),
    Plain { x: Point, kind: SolverKind },
}

/// Runs `spec` against `oracle` and records one [`TraceRecord`] per iteration.
///
/// Setup problems (bad initial points, invalid spec) are returned as errors.
/// A failure during the iterations stops the run and is stored in
/// [`Trace::failure`], with the completed records kept.
pub fn run(spec: &SolverSpec, oracle: &Oracle, options: &RunOptions) -> Result<Trace> {
    spec.kind.validate()?;
    if spec.horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let problem = oracle.problem();
    let geometry = *problem.geometry();
    let x0 = match &options.init.start {
        Some(x) => x.clone(),
        None => geometry.barycenter(),
    };
    geometry.check_point(&x0)?;

    let mut trace = Trace {
        solver: spec.kind.to_string(),
        optimum_value: problem.optimum().map(|o| o.value),
        ..Trace::default()
    };

    let mut driver = match spec.kind {
        SolverKind::AdaMir => {
            let x1 = match &options.init.second {
                SecondPoint::ProxStep { gamma_init } => {
                    if !(gamma_init.is_finite() && *gamma_init > 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "gamma_init must be positive, got {gamma_init}"
                        )));
                    }
                    let g = oracle.query(&x0, 0)?;
                    geometry.prox_step(&x0, &g.scaled(-gamma_init))?
                }
                SecondPoint::Explicit(x1) => {
                    geometry.check_point(x1)?;
                    x1.clone()
                }
            };
            let state = AdaMirState::init(&geometry, x0, x1)?;
            trace.rho0_sq = Some(state.rho0_sq());
            Driver::Ada(state)
        }
        kind => Driver::Plain { x: x0, kind },
    };

    let started = Instant::now();
    let dim = geometry.dim();
    let mut sum = vec![0.0; dim];
    let use_pr_closed_form = oracle.is_deterministic() && problem.market().is_some();

    for t in 1..=spec.horizon {
        let result = (|| -> Result<TraceRecord> {
            let x = match &driver {
                Driver::Ada(state) => state.current(),
                Driver::Plain { x, .. } => x,
            };
            for (s, v) in sum.iter_mut().zip(x.iter()) {
                *s += v;
            }
            let avg = Point::new(sum.iter().map(|s| s / t as f64).collect());
            let f_last = problem.value(x)?;
            let f_avg = problem.value(&avg)?;
            let div_to_opt = problem
                .optimum()
                .map(|o| geometry.divergence(&o.point, x))
                .transpose()?;

            let (gamma, rho_sq) = match &mut driver {
                Driver::Ada(state) => {
                    let out = state.step(&geometry, oracle)?;
                    (out.gamma, out.rho_sq)
                }
                Driver::Plain { x, kind } => {
                    let (gamma, next) = match *kind {
                        SolverKind::ProportionalResponse if use_pr_closed_form => {
                            let mkt = problem.market().expect("checked above");
                            (1.0, pr_step(mkt, x)?)
                        }
                        kind => {
                            let gamma = match kind {
                                SolverKind::FixedMd { gamma } => gamma,
                                SolverKind::DecayedMd { gamma0 } => gamma0 / (t as f64).sqrt(),
                                _ => 1.0,
                            };
                            let g: DualVector = oracle.query(x, t as u64)?;
                            (gamma, geometry.prox_step(x, &g.scaled(-gamma))?)
                        }
                    };
                    let rho_sq = geometry.symmetric_divergence(x, &next)? / (gamma * gamma);
                    *x = next;
                    (gamma, rho_sq)
                }
            };

            let wallclock_ns = if options.record_wallclock {
                u64::try_from(started.elapsed().as_nanos()).unwrap_or(u64::MAX)
            } else {
                0
            };
            Ok(TraceRecord {
                t,
                f_last,
                f_avg,
                gamma,
                rho_sq,
                div_to_opt,
                wallclock_ns,
            })
        })();
        match result {
            Ok(rec) => trace.records.push(rec),
            Err(e) => {
                trace.failure = Some(format!("iteration {t}: {e}"));
                break;
            }
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BregmanGeometry;
    use crate::oracle::OracleConfig;
    use crate::problems::{
        fisher_problem, make_random_market, make_synthetic_rc_problem, Objective, Problem,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solver_grammar() {
        assert_eq!("adamir".parse::<SolverKind>().unwrap(), SolverKind::AdaMir);
        assert_eq!(
            "pr".parse::<SolverKind>().unwrap(),
            SolverKind::ProportionalResponse
        );
        assert_eq!(
            "egd:0.1".parse::<SolverKind>().unwrap(),
            SolverKind::FixedMd { gamma: 0.1 }
        );
        assert_eq!(
            "md-decay:2".parse::<SolverKind>().unwrap(),
            SolverKind::DecayedMd { gamma0: 2.0 }
        );
        for bad in [
            "",
            "egd",
            "egd:",
            "egd:-1",
            "egd:nan",
            "md-decay:0",
            "adamir:1",
            "sgd:1",
        ] {
            assert!(
                matches!(bad.parse::<SolverKind>(), Err(Error::Parse(_))),
                "{bad}"
            );
        }
        assert_eq!(SolverKind::FixedMd { gamma: 0.1 }.to_string(), "egd:0.1");
        assert_eq!(
            SolverKind::DecayedMd { gamma0: 0.5 }.label(),
            "md-decay-0.5"
        );
    }

    #[test]
    fn spec_rejects_zero_horizon() {
        assert!(SolverSpec::new(SolverKind::AdaMir, 0).is_err());
        assert!(SolverSpec::new(SolverKind::FixedMd { gamma: 0.0 }, 5).is_err());
    }

    #[test]
    fn single_iteration_trace() {
        let problem = make_synthetic_rc_problem(3).unwrap();
        let oracle = Oracle::deterministic(problem.clone());
        for kind in ["adamir", "pr", "egd:0.1", "md-decay:1"] {
            let spec = SolverSpec::new(kind.parse().unwrap(), 1).unwrap();
            let trace = run(&spec, &oracle, &RunOptions::default()).unwrap();
            assert_eq!(trace.len(), 1);
            let rec = &trace.records[0];
            assert_eq!(rec.t, 1);
            assert_eq!(rec.f_last, rec.f_avg);
            assert!(rec.gamma > 0.0 && rec.rho_sq >= 0.0);
        }
    }

    #[test]
    fn adamir_first_step_on_market_is_egd_with_gamma_one() {
        let mkt = make_random_market(5, 3, 2.0, 8.0, 11).unwrap();
        let geometry = mkt.geometry();
        let problem = fisher_problem(mkt.clone()).unwrap();
        let oracle = Oracle::deterministic(problem);
        let x0 = geometry.barycenter();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x1 = geometry.random_point(&mut rng);
        let mut state = AdaMirState::init(&geometry, x0, x1.clone()).unwrap();
        let gamma = state.step_size();
        state.step(&geometry, &oracle).unwrap();
        let egd = egd_step(&mkt, &x1, gamma).unwrap();
        for (a, b) in state.current().iter().zip(egd.iter()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn deterministic_runs_are_bit_identical() {
        let problem = make_synthetic_rc_problem(4).unwrap();
        let oracle = Oracle::new(problem, OracleConfig::sphere_uniform(0.5, 3)).unwrap();
        let spec = SolverSpec::new(SolverKind::AdaMir, 200).unwrap();
        let a = run(&spec, &oracle, &RunOptions::default()).unwrap();
        let b = run(&spec, &oracle, &RunOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn recorded_steps_never_increase() {
        let problem = make_synthetic_rc_problem(5).unwrap();
        let oracle = Oracle::new(problem, OracleConfig::sphere_uniform(1.0, 9)).unwrap();
        let spec = SolverSpec::new(SolverKind::AdaMir, 500).unwrap();
        let trace = run(&spec, &oracle, &RunOptions::default()).unwrap();
        assert!(trace.records.windows(2).all(|w| w[1].gamma <= w[0].gamma));
    }

    #[test]
    fn pr_decreases_market_objective() {
        let mkt = make_random_market(50, 5, 2.0, 8.0, 0).unwrap();
        let oracle = Oracle::deterministic(fisher_problem(mkt).unwrap());
        let spec = SolverSpec::new(SolverKind::ProportionalResponse, 1_000).unwrap();
        let trace = run(&spec, &oracle, &RunOptions::default()).unwrap();
        assert!(trace.failure.is_none());
        for w in trace.records.windows(2) {
            assert!(w[1].f_last <= w[0].f_last + 1e-12, "t = {}", w[1].t);
        }
    }

    #[derive(Debug)]
    struct Linear(Vec<f64>);

    impl Objective for Linear {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, x: &Point) -> Result<f64> {
            Ok(x.iter().zip(&self.0).map(|(a, b)| a * b).sum())
        }
        fn gradient(&self, _: &Point) -> Result<DualVector> {
            Ok(DualVector::new(self.0.clone()))
        }
    }

    #[test]
    fn log_barrier_overshoot_keeps_partial_trace() {
        let geometry = BregmanGeometry::log_barrier(1);
        let problem = Problem::new("slope", Linear(vec![-1.0]), geometry).unwrap();
        let oracle = Oracle::deterministic(problem);
        let spec = SolverSpec::new(SolverKind::FixedMd { gamma: 0.5 }, 10).unwrap();
        let options = RunOptions {
            init: InitPolicy {
                start: Some(Point::new(vec![1.0])),
                ..InitPolicy::default()
            },
            ..RunOptions::default()
        };
        // x/(1 - γx) blows up once x reaches 2.
        let trace = run(&spec, &oracle, &options).unwrap();
        assert!(trace.failure.is_some());
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn degenerate_second_point_is_a_setup_error() {
        let problem = make_synthetic_rc_problem(3).unwrap();
        let oracle = Oracle::deterministic(problem);
        let spec = SolverSpec::new(SolverKind::AdaMir, 5).unwrap();
        let options = RunOptions {
            init: InitPolicy {
                start: None,
                second: SecondPoint::Explicit(BregmanGeometry::simplex(3).barycenter()),
            },
            ..RunOptions::default()
        };
        assert!(matches!(
            run(&spec, &oracle, &options),
            Err(Error::DegenerateInit(_))
        ));
    }
}
