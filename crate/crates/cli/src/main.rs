//! `mkperc`: run simulations, sweeps and offline analysis.
//!
//! Exit codes: 0 on success, 1 on configuration errors (bad flags, missing
//! or invalid config files, unknown presets), 2 on runtime failures.

mod analyze;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use mkperc_core::experiments::{preset, run_simulation, run_sweep, RunOptions, StopRule, SweepSpec};
use mkperc_core::{Error, Execution, SimConfig};

use output::{OutputDir, SnapshotWriter};

const CONFIG_FIELDS: &str = "\
Config file fields (JSON or TOML, all optional; flags override the file):
  d_side     grid side in cells, >= 1; the torus has d_side^2 cells (1000, 5000, 10000)
  ng         number of groups, >= 1 (default 2)
  N          number of agents, >= 1 (1000, 10000, 100000)
  m          mobility, max cells moved per axis per tick, >= 0 (default 1)
  oh         overhearing radius in cells, >= 0 (0..4)
  pforg      per-agent per-tick forgetting probability in [0, 1] (0.001, 0.1, 0.5, 0.7)
  chgr       enable random group changes, true/false (default false)
  p_change   per-agent per-tick group-change probability in [0, 1], used when chgr is true
  seed       RNG seed, unsigned 64-bit
  max_ticks  run length in ticks
  snapshot_ticks       strictly increasing extra snapshot ticks
  geometric_snapshots  also snapshot at ticks 1, 2, 4, 8, ... (default true)
  metric     chebyshev | euclidean (default chebyshev)
  metrics_every        metrics row cadence in ticks, >= 1 (default 100)

Environment:
  MKPERC_WORKERS  worker threads for sweeps and per-tick parallel loops";

#[derive(Parser)]
#[command(name = "mkperc", version, about = "Mutual-knowledge simulation and percolation analysis")]
#[command(after_long_help = CONFIG_FIELDS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and export metrics, snapshots and thresholds.
    #[command(after_long_help = CONFIG_FIELDS)]
    Run(RunArgs),
    /// Run a replicated parameter sweep.
    Sweep(SweepArgs),
    /// Re-analyze the exported networks and metrics of a run directory.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON or TOML config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "mkperc-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_ticks: Option<u64>,
    /// Number of agents.
    #[arg(long = "n")]
    n: Option<u32>,
    #[arg(long)]
    d_side: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    oh: Option<u32>,
    #[arg(long)]
    pforg: Option<f64>,
    #[arg(long)]
    p_change: Option<f64>,
    /// Enable group changes.
    #[arg(long)]
    chgr: Option<bool>,
    /// Write the meeting event log as `tick,a,b` lines.
    #[arg(long)]
    events: bool,
    /// Keep running after MK and the meeting rate saturate.
    #[arg(long, conflicts_with = "stop_on_mk")]
    no_early_stop: bool,
    /// Stop as soon as MK saturates, whatever the meeting rate.
    #[arg(long)]
    stop_on_mk: bool,
    /// Skip Pajek and CSV network snapshots.
    #[arg(long)]
    no_snapshots: bool,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Name of a built-in preset (scaling, density, overhearing, forgetting, churn).
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<String>,
    /// JSON or TOML sweep spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Drop cells with more agents than this.
    #[arg(long, default_value_t = 10_000)]
    max_n: u32,
    #[arg(long)]
    replicates: Option<u32>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long, default_value = "mkperc-sweep")]
    out: PathBuf,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Directory written by `mkperc run`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Report path (default: `<in>/analysis.json`).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_config() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = configure_workers() {
        eprintln!("mkperc: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Analyze(args) => analyze::cmd_analyze(&args.input, args.out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mkperc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(value) = std::env::var("MKPERC_WORKERS") else {
        return Ok(());
    };
    let workers: usize = value
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| config_failure(format!("MKPERC_WORKERS must be a positive integer, got `{value}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Failure {
            code: 2,
            message: e.to_string(),
        })?;
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    Ok(())
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_config(args: &RunArgs) -> Result<SimConfig, Failure> {
    let mut cfg = SimConfig::from_path(&args.config)?;
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.max_ticks {
        cfg.max_ticks = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.d_side {
        cfg.d_side = v;
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = args.oh {
        cfg.oh = v;
    }
    if let Some(v) = args.pforg {
        cfg.pforg = v;
    }
    if let Some(v) = args.p_change {
        cfg.p_change = v;
    }
    if let Some(v) = args.chgr {
        cfg.chgr = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config(&args)?;
    let started = output::unix_now();
    let out = OutputDir::create(&args.out)?;
    out.write_json("config.json", &cfg)?;

    let options = RunOptions {
        stop: if args.no_early_stop {
            StopRule::Never
        } else if args.stop_on_mk {
            StopRule::MkSaturated
        } else {
            StopRule::Saturated
        },
        exec: execution(args.sequential),
        log_events: args.events,
    };
    info!("running N={} d_side={} oh={} for up to {} ticks", cfg.n, cfg.d_side, cfg.oh, cfg.max_ticks);
    let result = if args.no_snapshots {
        run_simulation(&cfg, options, &mut mkperc_core::netcap::DiscardSnapshots)?
    } else {
        let mut sink = SnapshotWriter::new(&out)?;
        let result = run_simulation(&cfg, options, &mut sink)?;
        sink.finish()?;
        result
    };

    out.write_metrics(&result.rows)?;
    if let Some(events) = &result.events {
        out.write_events(events)?;
    }
    out.write_json("thresholds.json", &result)?;
    out.write_manifest(&cfg, cfg.seed, started)?;
    println!(
        "ticks {}  final MK {:.4}  meeting rate {:.4}  knowledge T_c {}  meeting T_c {}",
        result.ticks,
        result.final_mk,
        result.final_meeting_rate,
        fmt_opt(result.knowledge.t_c),
        fmt_opt(result.meeting.t_c),
    );
    Ok(())
}

fn fmt_opt(v: Option<u64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn sweep_specs(args: &SweepArgs) -> Result<Vec<SweepSpec>, Failure> {
    let mut specs = match (&args.preset, &args.spec) {
        (Some(name), _) => preset(name)?.sweeps,
        (None, Some(path)) => vec![SweepSpec::from_path(path)?],
        (None, None) => return Err(config_failure("either --preset or --spec is required")),
    };
    for spec in &mut specs {
        spec.restrict_n(args.max_n);
        if let Some(r) = args.replicates {
            spec.replicates = r;
        }
        if let Some(s) = args.master_seed {
            spec.master_seed = s;
        }
    }
    specs.retain(|s| !s.axis.values.is_empty());
    if specs.is_empty() {
        return Err(config_failure(format!("no sweep cells left with --max-n {}", args.max_n)));
    }
    for spec in &specs {
        spec.validate()?;
    }
    Ok(specs)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let specs = sweep_specs(&args)?;
    let started = output::unix_now();
    let out = OutputDir::create(&args.out)?;
    let single = specs.len() == 1;
    for spec in &specs {
        let dir: PathBuf = if single {
            args.out.clone()
        } else {
            args.out.join(&spec.name)
        };
        let result = run_sweep(spec, execution(args.sequential), Some(&dir))?;
        for cell in &result.cells {
            println!(
                "{} {}={}: {}/{} runs, knowledge T_c {}, p_c {}",
                spec.name,
                result.param,
                cell.value,
                cell.runs_ok,
                spec.replicates,
                cell.t_c_knowledge
                    .map_or("-".to_string(), |s| format!("{:.1} +- {:.1}", s.mean, s.std)),
                cell.p_c_knowledge
                    .map_or("-".to_string(), |s| format!("{:.3e} +- {:.1e}", s.mean, s.std)),
            );
        }
    }
    out.write_json("specs.json", &specs)?;
    out.write_manifest(&specs, specs[0].master_seed, started)?;
    Ok(())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}
