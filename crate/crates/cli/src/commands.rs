use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use adamir::analysis::{
    summarize_multiseed, summarize_run, MultiSeedStats, RunMeta, RunSummary, Trace,
};
use adamir::solvers::{InitPolicy, RunOptions, SecondPoint};
use adamir::{run, Oracle, Problem, SolverSpec};
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::Serialize;

use crate::config::{RunConfig, SolverArg};
use crate::error::{CliError, CliResult};

pub const SUMMARY_FILE: &str = "summary.json";

/// One finished run and where its trace went.
#[derive(Clone, Debug)]
pub struct RunArtifact {
    pub solver: SolverArg,
    pub seed: u64,
    pub csv: PathBuf,
    pub trace: Trace,
    pub summary: RunSummary,
}

#[derive(Serialize, JsonSchema)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    csv: String,
    summary: &'a RunSummary,
}

#[derive(Serialize, JsonSchema)]
struct SummaryFile<'a> {
    config: &'a RunConfig,
    runs: Vec<Sidecar<'a>>,
}

#[derive(Serialize, JsonSchema)]
struct StatsFile<'a> {
    config: &'a RunConfig,
    stats: &'a MultiSeedStats,
}

/// JSON Schemas of the files `run` and `sweep` write, keyed by file name.
pub fn output_schemas() -> Vec<(&'static str, schemars::Schema)> {
    vec![
        ("run_sidecar.schema.json", schemars::schema_for!(Sidecar)),
        ("summary.schema.json", schemars::schema_for!(SummaryFile)),
        ("stats.schema.json", schemars::schema_for!(StatsFile)),
        (
            "trace_record.schema.json",
            schemars::schema_for!(adamir::analysis::TraceRecord),
        ),
    ]
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(adamir::Error::from)?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn file_stem(problem: &Problem, solver: SolverArg, seed: u64) -> String {
    format!("{}_{}_seed{}", problem.name(), solver.0.label(), seed)
}

fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

fn execute_one(
    config: &RunConfig,
    problem: &Problem,
    out_dir: &Path,
    solver: SolverArg,
    seed: u64,
) -> CliResult<RunArtifact> {
    let oracle = Oracle::new(problem.clone(), config.oracle.for_seed(seed))?;
    let spec = SolverSpec::new(solver.0, config.horizon)?;
    let options = RunOptions {
        init: InitPolicy {
            start: None,
            second: SecondPoint::ProxStep {
                gamma_init: config.gamma_init,
            },
        },
        record_wallclock: config.record_wallclock,
    };
    let trace = run(&spec, &oracle, &options)?;
    let meta = RunMeta {
        problem: problem.name().to_string(),
        seed,
        sigma: oracle.sigma(),
        deterministic: oracle.is_deterministic(),
        horizon: config.horizon,
    };
    let summary = summarize_run(&trace, meta);

    let stem = file_stem(problem, solver, seed);
    let csv = out_dir.join(format!("{stem}.csv"));
    let file = File::create(&csv).map_err(io_err(&csv))?;
    let mut w = BufWriter::new(file);
    trace.write_csv(&mut w)?;
    w.flush().map_err(io_err(&csv))?;
    write_json(
        &out_dir.join(format!("{stem}.json")),
        &Sidecar {
            config,
            csv: format!("{stem}.csv"),
            summary: &summary,
        },
    )?;
    Ok(RunArtifact {
        solver,
        seed,
        csv,
        trace,
        summary,
    })
}

fn execute_all(config: &RunConfig, jobs: Option<usize>) -> CliResult<(PathBuf, Vec<RunArtifact>)> {
    config.validate()?;
    let problem = config.problem.build()?;
    let out_dir = config.resolved_out_dir();
    fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    let tasks: Vec<(SolverArg, u64)> = config
        .solvers
        .iter()
        .flat_map(|&s| config.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let pool = thread_pool(jobs)?;
    let artifacts = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(solver, seed)| execute_one(config, &problem, &out_dir, solver, seed))
            .collect::<CliResult<Vec<_>>>()
    })?;
    let summary = SummaryFile {
        config,
        runs: artifacts
            .iter()
            .map(|a| Sidecar {
                config,
                csv: a
                    .csv
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned(),
                summary: &a.summary,
            })
            .collect(),
    };
    write_json(&out_dir.join(SUMMARY_FILE), &summary)?;
    Ok((out_dir, artifacts))
}

fn check_aborts(artifacts: &[RunArtifact]) -> CliResult<()> {
    let failed: Vec<_> = artifacts
        .iter()
        .filter_map(|a| {
            a.trace
                .failure
                .as_ref()
                .map(|f| format!("{} seed {}: {f}", a.solver, a.seed))
        })
        .collect();
    match failed.first() {
        None => Ok(()),
        Some(first) => Err(CliError::Aborted(failed.len(), first.clone())),
    }
}

/// Runs every solver for every configured seed, writing one CSV trace and one JSON
/// sidecar per run plus `summary.json`.
///
/// Aborted runs keep their partial traces on disk and are reported as
/// [`CliError::Aborted`] after everything is written.
pub fn cmd_run(config: &RunConfig, jobs: Option<usize>) -> CliResult<Vec<RunArtifact>> {
    let (_, artifacts) = execute_all(config, jobs)?;
    check_aborts(&artifacts)?;
    Ok(artifacts)
}

/// As [`cmd_run`], then aggregates each solver across seeds into `stats_<solver>.json`.
pub fn cmd_sweep(config: &RunConfig, jobs: Option<usize>) -> CliResult<Vec<MultiSeedStats>> {
    let (out_dir, artifacts) = execute_all(config, jobs)?;
    check_aborts(&artifacts)?;
    let mut all = Vec::new();
    for solver in &config.solvers {
        let traces: Vec<Trace> = artifacts
            .iter()
            .filter(|a| a.solver == *solver)
            .map(|a| a.trace.clone())
            .collect();
        let stats = summarize_multiseed(&traces)?;
        write_json(
            &out_dir.join(format!("stats_{}.json", solver.0.label())),
            &StatsFile {
                config,
                stats: &stats,
            },
        )?;
        all.push(stats);
    }
    Ok(all)
}
