use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dvrptw::format::{load_instance, write_event_log, write_solution, LoadedInstance};
use dvrptw::report::{csv_column, emit_csv, emit_table};
use dvrptw::run::{run_batch, run_once, RunConfig, RunReport};
use dvrptw::stats::{aggregate, rank_sum_test};
use dvrptw_core::acs::AcsParams;
use dvrptw_core::planner::{ClockMode, PlannerConfig};

#[derive(Parser)]
#[command(version, about = "Ant colony solver for the dynamic VRP with time windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance once.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolverOpts,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the final solution here.
        #[arg(long)]
        solution_out: Option<PathBuf>,
        /// Write the JSON-lines event log here.
        #[arg(long)]
        events_out: Option<PathBuf>,
    },
    /// Repeated runs with statistics. Instances named `<X>-<d>` are compared
    /// against `<X>-0.0` when both are given.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[command(flatten)]
        opts: SolverOpts,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Explicit seeds; overrides --runs.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Directory for per-run event logs.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Rank-sum test on the TD columns of two bench CSV files.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Clock {
    Wall,
    Virtual,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Output {
    Table,
    Csv,
}

#[derive(Args)]
struct SolverOpts {
    /// Available-time sidecar (`id time` per line).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = 100.0)]
    t_wd: f64,
    #[arg(long, default_value_t = 50)]
    n_ts: usize,
    #[arg(long, default_value_t = 10)]
    ants: usize,
    #[arg(long, default_value_t = 0.9)]
    q0: f64,
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, default_value_t = 20)]
    cl: usize,
    #[arg(long, value_enum, default_value_t = Clock::Wall)]
    clock: Clock,
    #[arg(long, default_value_t = 200)]
    virtual_iters_per_slice: u64,
    #[arg(long, value_enum, default_value_t = Output::Table)]
    out: Output,
}

impl SolverOpts {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let cfg = RunConfig {
            planner: PlannerConfig {
                t_wd: self.t_wd,
                n_ts: self.n_ts,
                clock: match self.clock {
                    Clock::Wall => ClockMode::Wall,
                    Clock::Virtual => ClockMode::Virtual,
                },
                iters_per_slice: self.virtual_iters_per_slice,
            },
            acs: AcsParams {
                n_ants: self.ants,
                q0: self.q0,
                rho: self.rho,
                candidate_list_size: self.cl,
                ..Default::default()
            },
        };
        cfg.planner.validate()?;
        cfg.acs.validate()?;
        Ok(cfg)
    }
}

/// Failures map to exit codes: 1 for input and configuration problems, 2 when
/// the instance cannot be fully served.
enum Failure {
    Config(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let infeasible = e
            .chain()
            .any(|c| matches!(c.downcast_ref(), Some(dvrptw_core::Error::InfeasibleCustomer { .. })));
        if infeasible {
            Failure::Infeasible(e)
        } else {
            Failure::Config(e)
        }
    }
}

fn load(path: &Path, sidecar: Option<&PathBuf>) -> anyhow::Result<LoadedInstance> {
    load_instance(path, sidecar.map(PathBuf::as_path)).with_context(|| format!("loading {}", path.display()))
}

fn check_served(reports: &[RunReport]) -> Result<(), Failure> {
    match reports.iter().find(|r| !r.hard_infeasible.is_empty()) {
        Some(r) => Err(Failure::Infeasible(anyhow::anyhow!(
            "{} (seed {}): customers {:?} could not be served",
            r.instance,
            r.seed,
            r.hard_infeasible
        ))),
        None => Ok(()),
    }
}

fn solve(
    instance: PathBuf,
    opts: SolverOpts,
    seed: u64,
    solution_out: Option<PathBuf>,
    events_out: Option<PathBuf>,
) -> Result<(), Failure> {
    let cfg = opts.config()?;
    let loaded = load(&instance, opts.sidecar.as_ref())?;
    let (report, outcome) = run_once(&loaded, seed, &cfg)?;
    let scaled = loaded.instance.scale_to_working_day(cfg.planner.t_wd).map_err(anyhow::Error::from)?;
    if let Some(path) = solution_out {
        fs::write(&path, write_solution(&outcome.solution, &scaled))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = events_out {
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_event_log(&outcome.events, &scaled, std::io::BufWriter::new(file))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if opts.out == Output::Csv {
        print!("{}", emit_csv(std::slice::from_ref(&report)));
    } else {
        print!("{}", write_solution(&outcome.solution, &scaled));
    }
    check_served(std::slice::from_ref(&report))
}

fn bench(
    instances: Vec<PathBuf>,
    opts: SolverOpts,
    runs: usize,
    seeds: Vec<u64>,
    log_dir: Option<PathBuf>,
) -> Result<(), Failure> {
    let cfg = opts.config()?;
    let seeds: Vec<u64> = if seeds.is_empty() { (1..=runs as u64).collect() } else { seeds };
    if seeds.is_empty() {
        return Err(Failure::Config(anyhow::anyhow!("no runs requested")));
    }
    if let Some(dir) = &log_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut batches: Vec<(LoadedInstance, Vec<RunReport>)> = Vec::new();
    for path in &instances {
        let loaded = load(path, opts.sidecar.as_ref())?;
        let reports = run_batch(&loaded, &seeds, &cfg, log_dir.as_deref())?;
        batches.push((loaded, reports));
    }
    let statics: BTreeMap<String, &[RunReport]> = batches
        .iter()
        .filter(|(l, _)| l.dynamicity == 0.0)
        .map(|(l, r)| (base_name(&l.label).to_string(), r.as_slice()))
        .collect();
    let all: Vec<RunReport> = batches.iter().flat_map(|(_, r)| r.iter().cloned()).collect();
    if opts.out == Output::Csv {
        print!("{}", emit_csv(&all));
    } else {
        let mut stats = Vec::new();
        for (loaded, reports) in &batches {
            let reference = statics.get(base_name(&loaded.label)).copied();
            stats.push(aggregate(reports, reference).map_err(anyhow::Error::from)?);
        }
        print!("{}", emit_table(&stats));
    }
    check_served(&all)
}

fn base_name(label: &str) -> &str {
    label.rsplit_once('-').map_or(label, |(b, _)| b)
}

fn compare(a: PathBuf, b: PathBuf) -> Result<(), Failure> {
    let read = |p: &PathBuf| -> anyhow::Result<Vec<f64>> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        csv_column(&text, "td_unscaled").map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))
    };
    let (xa, xb) = (read(&a)?, read(&b)?);
    let r = rank_sum_test(&xa, &xb).map_err(anyhow::Error::from)?;
    println!("n_a {} n_b {} U {:.1} z {:.4} p {:.6}", xa.len(), xb.len(), r.u, r.z, r.p_value);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            instance,
            opts,
            seed,
            solution_out,
            events_out,
        } => solve(instance, opts, seed, solution_out, events_out),
        Command::Bench {
            instances,
            opts,
            runs,
            seeds,
            log_dir,
        } => bench(instances, opts, runs, seeds, log_dir),
        Command::Compare { a, b } => compare(a, b),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(e)) => {
            eprintln!("infeasible: {e:#}");
            ExitCode::from(2)
        }
    }
}
