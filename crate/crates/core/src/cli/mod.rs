//! Command-line surface: simulate, estimate, shape, validate and bench.

pub mod bench;
pub mod validate;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::equilibrium::SolverOptions;
use crate::error::{Error, Result};
use crate::io::report::{
    summarize_estimates, summarize_shapes, write_estimates, write_shapes, EstimateRow, ShapeRow,
};
use crate::io::{load_scenario, read_trace, write_trace, RobotConfig, TraceFile};
use crate::perception::{EstimateMode, Estimator, ReciprocationDetector};
use crate::simulator::run_scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_ALL_FAILED: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "ncr-proprio", version, about = "Shape, contact force and contact location from proximal sensing")]
pub struct Cli {
    /// Worker threads for parallel stages; defaults to the machine parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the random seed of the scenario.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario through the forward simulator and write a sensor trace.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        io: CommonIo,
    },
    /// Estimate contact force, location and shape for every frame of a trace.
    Estimate {
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        io: CommonIo,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Replace estimates since a passive onset with the one after a completed reciprocation.
        #[arg(long)]
        recalibrate: bool,
        /// Add a wall-clock solve_ms column (not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Write the estimated backbone poses of every frame.
    Shape {
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        io: CommonIo,
    },
    /// Check the model against its oracles for a configuration.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Measure estimation and shape throughput on one core.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Frames per benchmark.
        #[arg(long, default_value_t = 100)]
        frames: usize,
    },
}

#[derive(Debug, Args)]
pub struct CommonIo {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Tip,
    Body,
}

impl From<ModeArg> for EstimateMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Auto => EstimateMode::Auto,
            ModeArg::Tip => EstimateMode::Tip,
            ModeArg::Body => EstimateMode::Body,
        }
    }
}

/// Exit status for an error that ends a command.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Parse { .. } | Error::InvalidParameter { .. } | Error::InvalidConfiguration(_) => EXIT_INPUT,
        _ => EXIT_INFEASIBLE,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidConfiguration(format!("cannot create {}: {e}", path.display())))
}

fn open_trace(path: &Path) -> Result<TraceFile> {
    let f = File::open(path).map_err(|e| Error::InvalidConfiguration(format!("cannot read {}: {e}", path.display())))?;
    read_trace(BufReader::new(f))
}

pub fn cmd_simulate(scenario: &Path, config: &Path, out: &Path, seed: Option<u64>) -> Result<i32> {
    let cfg = RobotConfig::load(config)?;
    let mut sc = load_scenario(scenario)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    sc.validate(&cfg.params)?;
    let trace = match run_scenario(&sc, &cfg.params) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INFEASIBLE);
        }
    };
    write_trace(create(out)?, &trace.frames, Some(&trace.truth))?;
    println!("wrote {} frames to {}", trace.frames.len(), out.display());
    Ok(EXIT_OK)
}

pub fn cmd_estimate(trace: &Path, config: &Path, out: &Path, mode: EstimateMode, recalibrate: bool, timing: bool) -> Result<i32> {
    let cfg = RobotConfig::load(config)?;
    let trace = open_trace(trace)?;
    let est_config = cfg.estimator_config();
    let mut estimator = Estimator::new(cfg.params.clone(), est_config)?;
    let mut detector = ReciprocationDetector::new();
    let mut rows: Vec<EstimateRow> = Vec::with_capacity(trace.frames.len());
    for (k, frame) in trace.frames.iter().enumerate() {
        let start = Instant::now();
        let outcome = estimator.process(frame, mode).map_err(|e| e.to_string());
        let solve_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        if recalibrate {
            if let Some(onset) = detector.update(k, frame, outcome.as_ref().ok(), &est_config) {
                let mut settled = outcome.clone().expect("detector only completes on a contact estimate");
                settled.flags.recalibrated = true;
                for row in &mut rows[onset..] {
                    let mut e = settled.clone();
                    e.timestamp = row.timestamp;
                    row.outcome = Ok(e);
                }
                rows.push(EstimateRow {
                    timestamp: frame.timestamp,
                    outcome: Ok(settled),
                    solve_ms,
                });
                continue;
            }
        }
        rows.push(EstimateRow {
            timestamp: frame.timestamp,
            outcome,
            solve_ms,
        });
    }
    let summary = trace.truth.as_ref().map(|t| summarize_estimates(&rows, t));
    write_estimates(create(out)?, &rows, summary.as_ref(), timing)?;
    if let Some(s) = &summary {
        for line in s.lines() {
            println!("{line}");
        }
    }
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if !rows.is_empty() && failed == rows.len() {
        eprintln!("error: estimation failed on every frame");
        return Ok(EXIT_ALL_FAILED);
    }
    Ok(EXIT_OK)
}

pub fn cmd_shape(trace: &Path, config: &Path, out: &Path) -> Result<i32> {
    let cfg = RobotConfig::load(config)?;
    let trace = open_trace(trace)?;
    let mut est_config = cfg.estimator_config();
    est_config.shape_solver = SolverOptions::precise();
    let mut estimator = Estimator::new(cfg.params.clone(), est_config)?;
    let rows: Vec<ShapeRow> = trace
        .frames
        .iter()
        .map(|f| ShapeRow {
            timestamp: f.timestamp,
            outcome: estimator.process(f, EstimateMode::Auto).map(|e| e.shape).map_err(|e| e.to_string()),
        })
        .collect();
    let summary = trace.truth.as_ref().map(|t| summarize_shapes(&rows, t));
    write_shapes(create(out)?, &rows, summary.as_ref())?;
    if let Some(s) = &summary {
        for line in s.lines() {
            println!("{line}");
        }
    }
    if !rows.is_empty() && rows.iter().all(|r| r.outcome.is_err()) {
        eprintln!("error: shape estimation failed on every frame");
        return Ok(EXIT_ALL_FAILED);
    }
    Ok(EXIT_OK)
}

pub fn cmd_validate(config: &Path) -> Result<i32> {
    let cfg = RobotConfig::load(config)?;
    let checks = validate::run_validation(&cfg.params);
    let mut out = std::io::stdout().lock();
    for c in &checks {
        let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_bench(config: &Path, frames: usize) -> Result<i32> {
    let cfg = RobotConfig::load(config)?;
    let report = bench::run_benchmark(&cfg.params, frames)?;
    for line in report.lines() {
        println!("{line}");
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_INPUT;
        }
        // a second call in the same process keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Simulate { scenario, io } => cmd_simulate(scenario, &io.config, &io.out, cli.seed),
        Command::Estimate {
            trace,
            io,
            mode,
            recalibrate,
            timing,
        } => cmd_estimate(trace, &io.config, &io.out, (*mode).into(), *recalibrate, *timing),
        Command::Shape { trace, io } => cmd_shape(trace, &io.config, &io.out),
        Command::Validate { config } => cmd_validate(config),
        Command::Bench { config, frames } => cmd_bench(config, *frames),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
