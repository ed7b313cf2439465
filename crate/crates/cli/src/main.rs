use std::path::PathBuf;
use std::process::ExitCode;

use adamir_cli::config::OUT_DIR_ENV;
use adamir_cli::{
    cmd_run, cmd_sweep, cmd_verify, CliError, CliResult, NoiseChoice, ProblemConfig, RunConfig,
    SolverArg, VerifyOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "adamir",
    version,
    about = "Adaptive mirror descent experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run each solver once per seed and write traces.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated oracle seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Run each solver over seeds 1..=S and aggregate them.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeds.
        #[arg(long = "S", value_name = "S")]
        seeds: Option<u64>,
    },
    /// Run the certificate battery.
    Verify {
        /// Smaller sample counts and horizons.
        #[arg(long)]
        quick: bool,
        #[arg(long, hide = true, default_value_t = 1.0)]
        lemma_bound_scale: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemKind {
    Fisher,
    SyntheticRc,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    /// Buyers.
    #[arg(long)]
    n: Option<usize>,
    /// Goods.
    #[arg(long)]
    m: Option<usize>,
    /// Lower utility bound.
    #[arg(long)]
    lo: Option<f64>,
    /// Upper utility bound.
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    market_seed: Option<u64>,
    /// Dimension of the synthetic problem.
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated solvers: adamir, pr, egd:<gamma>, md-decay:<gamma0>.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<SolverArg>>,
    /// Horizon.
    #[arg(long = "T", alias = "horizon", value_name = "T")]
    horizon: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum)]
    noise: Option<NoiseChoice>,
    /// Relative half-width of the utility perturbation for resample noise.
    #[arg(long)]
    rel_width: Option<f64>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    gamma_init: Option<f64>,
    /// Record per-iteration wall-clock time.
    #[arg(long)]
    wallclock: bool,
}

impl CommonArgs {
    fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        match (self.problem, &cfg.problem) {
            (Some(ProblemKind::Fisher), ProblemConfig::SyntheticRc { .. }) => {
                cfg.problem = ProblemConfig::default()
            }
            (Some(ProblemKind::SyntheticRc), ProblemConfig::Fisher { .. }) => {
                cfg.problem = ProblemConfig::default_synthetic_rc()
            }
            _ => {}
        }
        match &mut cfg.problem {
            ProblemConfig::Fisher {
                n,
                m,
                lo,
                hi,
                market_seed,
            } => {
                if self.d.is_some() {
                    return Err(CliError::Config(
                        "--d applies to the synthetic-rc problem".into(),
                    ));
                }
                set(n, self.n);
                set(m, self.m);
                set(lo, self.lo);
                set(hi, self.hi);
                set(market_seed, self.market_seed);
            }
            ProblemConfig::SyntheticRc { d } => {
                if self.n.is_some()
                    || self.m.is_some()
                    || self.lo.is_some()
                    || self.hi.is_some()
                    || self.market_seed.is_some()
                {
                    return Err(CliError::Config(
                        "market flags apply to the fisher problem".into(),
                    ));
                }
                set(d, self.d);
            }
        }
        if let Some(solvers) = &self.solvers {
            cfg.solvers = solvers.clone();
        }
        set(&mut cfg.horizon, self.horizon);
        set(&mut cfg.oracle.sigma, self.sigma);
        set(&mut cfg.oracle.rel_width, self.rel_width);
        match self.noise {
            Some(noise) => cfg.oracle.noise = noise,
            None if self.sigma.is_some_and(|s| s > 0.0)
                && cfg.oracle.noise == NoiseChoice::None =>
            {
                cfg.oracle.noise = NoiseChoice::Sphere
            }
            None => {}
        }
        if self.out.is_some() {
            cfg.out_dir = self.out.clone();
        }
        set(&mut cfg.gamma_init, self.gamma_init);
        cfg.record_wallclock |= self.wallclock;
        Ok(cfg)
    }
}

fn gap(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |g| format!("{g:.3e}"))
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn execute(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Run { common, seeds } => {
            let mut cfg = common.resolve()?;
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
            }
            for a in cmd_run(&cfg, common.jobs)? {
                let fv = a.summary.final_values.as_ref();
                println!(
                    "{:<16} seed {:<4} f_avg gap {}  f_last gap {}  -> {}",
                    a.solver,
                    a.seed,
                    gap(fv.and_then(|f| f.f_avg_gap)),
                    gap(fv.and_then(|f| f.f_last_gap)),
                    a.csv.display()
                );
            }
            Ok(true)
        }
        Command::Sweep { common, seeds } => {
            let mut cfg = common.resolve()?;
            if let Some(s) = seeds {
                cfg.seeds = (1..=s).collect();
            }
            for stats in cmd_sweep(&cfg, common.jobs)? {
                if let Some(last) = stats.rows.last() {
                    println!(
                        "{:<16} {} seeds  f_avg {:.6e} ± {:.2e}  f_last {:.6e} ± {:.2e}",
                        stats.solver,
                        stats.seeds,
                        last.f_avg.mean,
                        last.f_avg.half_width,
                        last.f_last.mean,
                        last.f_last.half_width
                    );
                }
            }
            Ok(true)
        }
        Command::Verify {
            quick,
            lemma_bound_scale,
        } => {
            let results = cmd_verify(VerifyOptions {
                quick,
                lemma_bound_scale,
            });
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
