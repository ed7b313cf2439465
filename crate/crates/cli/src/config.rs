use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use adamir::problems::{fisher_problem, make_random_market, make_synthetic_rc_problem};
use adamir::{OracleConfig, Problem, SolverKind};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Output directory used when neither the config nor the environment names one.
pub const DEFAULT_OUT_DIR: &str = "adamir-out";
pub const OUT_DIR_ENV: &str = "ADAMIR_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Fisher {
        n: usize,
        m: usize,
        lo: f64,
        hi: f64,
        market_seed: u64,
    },
    SyntheticRc {
        d: usize,
    },
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig::Fisher {
            n: 50,
            m: 5,
            lo: 2.0,
            hi: 8.0,
            market_seed: 0,
        }
    }
}

impl ProblemConfig {
    pub fn default_synthetic_rc() -> Self {
        ProblemConfig::SyntheticRc { d: 5 }
    }

    pub fn build(&self) -> CliResult<Problem> {
        Ok(match *self {
            ProblemConfig::Fisher {
                n,
                m,
                lo,
                hi,
                market_seed,
            } => fisher_problem(make_random_market(n, m, lo, hi, market_seed)?)?,
            ProblemConfig::SyntheticRc { d } => make_synthetic_rc_problem(d)?,
        })
    }
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChoice {
    #[default]
    None,
    /// Additive noise uniform on a dual-norm ball of radius `sigma`.
    Sphere,
    /// Market gradients under multiplicatively perturbed utilities.
    Resample,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    #[serde(default)]
    pub noise: NoiseChoice,
    #[serde(default)]
    pub sigma: f64,
    /// Relative half-width of the utility perturbation for `resample`.
    #[serde(default = "default_rel_width")]
    pub rel_width: f64,
}

fn default_rel_width() -> f64 {
    0.5
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            noise: NoiseChoice::None,
            sigma: 0.0,
            rel_width: default_rel_width(),
        }
    }
}

impl OracleSettings {
    pub fn for_seed(&self, seed: u64) -> OracleConfig {
        match self.noise {
            NoiseChoice::None => OracleConfig::deterministic(),
            NoiseChoice::Sphere => OracleConfig::sphere_uniform(self.sigma, seed),
            NoiseChoice::Resample => OracleConfig::fisher_resample(self.rel_width, seed),
        }
    }
}

/// A solver written in the shorthand grammar, stored as text in config files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SolverArg(pub SolverKind);

impl TryFrom<String> for SolverArg {
    type Error = adamir::Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SolverArg> for String {
    fn from(s: SolverArg) -> String {
        s.0.to_string()
    }
}

impl FromStr for SolverArg {
    type Err = adamir::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(SolverArg)
    }
}

impl JsonSchema for SolverArg {
    fn schema_name() -> std::borrow::Cow<'static, str> {
        "SolverArg".into()
    }

    fn json_schema(_: &mut schemars::SchemaGenerator) -> schemars::Schema {
        schemars::json_schema!({
            "type": "string",
            "pattern": "^(adamir|pr|egd:.+|md-decay:.+)$"
        })
    }
}

impl fmt::Display for SolverArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Everything needed to reproduce a batch of runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverArg>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_gamma_init")]
    pub gamma_init: f64,
    #[serde(default)]
    pub record_wallclock: bool,
}

fn default_solvers() -> Vec<SolverArg> {
    vec![SolverArg(SolverKind::AdaMir)]
}

fn default_horizon() -> usize {
    1_000
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_gamma_init() -> f64 {
    adamir::solvers::DEFAULT_GAMMA_INIT
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemConfig::default(),
            solvers: default_solvers(),
            horizon: default_horizon(),
            oracle: OracleSettings::default(),
            seeds: default_seeds(),
            out_dir: None,
            gamma_init: default_gamma_init(),
            record_wallclock: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        for (i, a) in self.solvers.iter().enumerate() {
            if self.solvers[..i].contains(a) {
                return bad(format!("solver {a} is listed twice"));
            }
        }
        if self.horizon == 0 {
            return bad("the horizon must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if !(self.gamma_init.is_finite() && self.gamma_init > 0.0) {
            return bad(format!(
                "gamma_init must be positive, got {}",
                self.gamma_init
            ));
        }
        let o = &self.oracle;
        if !(o.sigma.is_finite() && o.sigma >= 0.0) {
            return bad(format!(
                "sigma must be a nonnegative number, got {}",
                o.sigma
            ));
        }
        if o.noise == NoiseChoice::Sphere && o.sigma == 0.0 {
            return bad("sphere noise needs sigma > 0".into());
        }
        if o.noise == NoiseChoice::None && o.sigma > 0.0 {
            return bad("sigma > 0 needs a noise model".into());
        }
        if o.noise == NoiseChoice::Resample && o.sigma != 0.0 {
            return bad("resample noise estimates sigma itself; leave sigma unset".into());
        }
        if o.noise == NoiseChoice::Resample && !matches!(self.problem, ProblemConfig::Fisher { .. })
        {
            return bad("resample noise only applies to Fisher markets".into());
        }
        if let ProblemConfig::Fisher { lo, hi, .. } = self.problem {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return bad(format!("utilities need 0 < lo < hi, got [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    /// The configured output directory, then the environment, then [`DEFAULT_OUT_DIR`].
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_file_parses() {
        let cfg = RunConfig::from_toml(
            r#"
            solvers = ["adamir", "egd:0.1", "pr"]
            horizon = 5000
            seeds = [3, 4]

            [problem]
            kind = "fisher"
            n = 10
            m = 3
            lo = 2.0
            hi = 8.0
            market_seed = 7

            [oracle]
            noise = "sphere"
            sigma = 0.5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.solvers.len(), 3);
        assert_eq!(cfg.solvers[1].0, SolverKind::FixedMd { gamma: 0.1 });
        assert_eq!(cfg.oracle.noise, NoiseChoice::Sphere);
        assert_eq!(cfg.oracle.rel_width, 0.5);
        assert_eq!(cfg.gamma_init, 1e-2);
        cfg.validate().unwrap();
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "solvers = [\"sgd\"]",
            "horizon = -1",
            "unknown = 1",
            "[problem]\nkind = \"fisher\"\nn = 2",
            "[problem]\nkind = \"synthetic_rc\"\nd = 3\nn = 2",
        ] {
            assert!(
                matches!(RunConfig::from_toml(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn validation_catches_inconsistent_noise() {
        let mut cfg = RunConfig::default();
        cfg.oracle.sigma = 1.0;
        assert!(cfg.validate().is_err());
        cfg.oracle.noise = NoiseChoice::Sphere;
        cfg.validate().unwrap();
        cfg.oracle.noise = NoiseChoice::Resample;
        assert!(cfg.validate().is_err());
        cfg.oracle.sigma = 0.0;
        cfg.validate().unwrap();
        cfg.problem = ProblemConfig::default_synthetic_rc();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_survives_json() {
        let cfg = RunConfig {
            solvers: vec!["md-decay:0.5".parse().unwrap()],
            ..RunConfig::default()
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"md-decay:0.5\""));
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg);
    }
}
