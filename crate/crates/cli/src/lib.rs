//! Scenario runner behind the `bel` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use config::{ConfigError, ScenarioConfig};
use report::{emit_profiles, RunReport};

/// Fallback output directory variable.
pub const OUT_DIR_ENV: &str = "BEL_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "bel-out";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    /// Overrides the solver tolerance of every run.
    pub tol: Option<f64>,
    /// Worker threads; 0 picks the available parallelism.
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub run: String,
    pub dir: PathBuf,
    pub report: RunReport,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.report.passed
    }
}

/// Parses `path`, runs every expanded configuration and writes one directory
/// per run.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Vec<RunSummary>, RunError> {
    let file = config::read_config(path)?;
    run_configs(file.expand(), opts)
}

pub fn run_configs(mut runs: Vec<ScenarioConfig>, opts: &RunOptions) -> Result<Vec<RunSummary>, RunError> {
    if let Some(tol) = opts.tol {
        for r in &mut runs {
            r.tol = tol;
        }
    }
    let names = run_names(&runs);
    let jobs = match opts.jobs {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(runs.len())
    .max(1);

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunSummary, RunError>>>> =
        Mutex::new((0..runs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = runs.get(i) else { break };
                let res = run_one(cfg, &names[i], opts.out.as_deref());
                results.lock().unwrap()[i] = Some(res);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every run is executed"))
        .collect()
}

fn run_names(runs: &[ScenarioConfig]) -> Vec<String> {
    match runs {
        [single] => vec![single.scenario.name().to_owned()],
        _ => (0..runs.len())
            .map(|i| format!("{}-{:03}", runs[i].scenario.name(), i))
            .collect(),
    }
}

/// `--out`, then the config's `out_dir`, then `$BEL_OUT_DIR`, then `bel-out`.
pub fn resolve_out_dir(cli: Option<&Path>, cfg: &ScenarioConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

pub fn run_one(cfg: &ScenarioConfig, name: &str, out: Option<&Path>) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    let outcome = scenarios::run(cfg);
    let seconds = start.elapsed().as_secs_f64();
    let report = RunReport::new(name, cfg, &outcome.checks, outcome.findings, seconds);

    let dir = resolve_out_dir(out, cfg).join(name);
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
    if outcome.columns.iter().any(|(_, c)| c.is_some()) {
        let csv = dir.join("profiles.csv");
        emit_profiles(&outcome.columns, &csv).map_err(io(&csv))?;
    }
    let json = dir.join("report.json");
    report.write(&json).map_err(io(&json))?;
    Ok(RunSummary {
        run: name.to_owned(),
        dir,
        report,
    })
}
