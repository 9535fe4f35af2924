//! Single runs and seeded batches.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use dvrptw_core::acs::AcsParams;
use dvrptw_core::planner::{run_working_day_virtual, ClockMode, DayOutcome, PlannerConfig};
use rayon::prelude::*;

use crate::format::{write_event_log, LoadedInstance};
use crate::wall::run_working_day_wall;

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub dynamicity: f64,
    pub seed: u64,
    pub nv: usize,
    /// Total distance in the instance's original units.
    pub td_unscaled: f64,
    pub feasible_solutions: u64,
    pub duration_s: f64,
    /// Revealed customers no vehicle could serve.
    pub hard_infeasible: Vec<usize>,
    pub event_log: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub planner: PlannerConfig,
    /// `seed` is replaced per run.
    pub acs: AcsParams,
}

/// One working day on `loaded` with the given seed. The instance is scaled
/// to the configured day length here.
pub fn run_once(loaded: &LoadedInstance, seed: u64, cfg: &RunConfig) -> anyhow::Result<(RunReport, DayOutcome)> {
    let inst = loaded
        .instance
        .scale_to_working_day(cfg.planner.t_wd)
        .with_context(|| format!("scaling {}", loaded.label))?;
    let params = AcsParams {
        seed,
        ..cfg.acs.clone()
    };
    let started = Instant::now();
    let outcome = match cfg.planner.clock {
        ClockMode::Virtual => run_working_day_virtual(&inst, cfg.planner.clone(), params),
        ClockMode::Wall => run_working_day_wall(&inst, cfg.planner.clone(), params),
    }
    .with_context(|| format!("solving {} with seed {seed}", loaded.label))?;
    let report = RunReport {
        instance: loaded.label.clone(),
        dynamicity: loaded.dynamicity,
        seed,
        nv: outcome.solution.n_vehicles(),
        td_unscaled: inst.unscale_length(outcome.solution.total_distance()),
        feasible_solutions: outcome.stats.feasible_solutions,
        duration_s: started.elapsed().as_secs_f64(),
        hard_infeasible: outcome.hard_infeasible.clone(),
        event_log: None,
    };
    Ok((report, outcome))
}

/// Independent runs, one per seed, in parallel. Reports come back in seed
/// order. With `log_dir`, each run's event log is written there as
/// `<label>-seed<seed>.jsonl`.
pub fn run_batch(
    loaded: &LoadedInstance,
    seeds: &[u64],
    cfg: &RunConfig,
    log_dir: Option<&Path>,
) -> anyhow::Result<Vec<RunReport>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let (mut report, outcome) = run_once(loaded, seed, cfg)?;
            if let Some(dir) = log_dir {
                let path = dir.join(format!("{}-seed{seed}.jsonl", loaded.label));
                let scaled = loaded.instance.scale_to_working_day(cfg.planner.t_wd)?;
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_event_log(&outcome.events, &scaled, BufWriter::new(file))
                    .with_context(|| format!("writing {}", path.display()))?;
                report.event_log = Some(path);
            }
            Ok(report)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use dvrptw_core::synthetic::{random_instance, SyntheticSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn loaded() -> LoadedInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let instance = random_instance(
            &mut rng,
            &SyntheticSpec {
                n_customers: 12,
                dynamicity: 0.5,
                ..Default::default()
            },
        );
        LoadedInstance {
            instance,
            label: "S12-0.5".into(),
            dynamicity: 0.5,
        }
    }

    fn quick(t_wd: f64) -> RunConfig {
        RunConfig {
            planner: PlannerConfig {
                t_wd,
                n_ts: 10,
                iters_per_slice: 3,
                ..Default::default()
            },
            acs: AcsParams {
                n_ants: 4,
                ..Default::default()
            },
        }
    }

    #[test]
    fn batches_are_reproducible_and_logged() {
        let dir = tempfile::tempdir().unwrap();
        let l = loaded();
        let a = run_batch(&l, &[1, 2, 3], &quick(100.0), Some(dir.path())).unwrap();
        let b = run_batch(&l, &[1, 2, 3], &quick(100.0), None).unwrap();
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.seed, x.nv, x.td_unscaled), (y.seed, y.nv, y.td_unscaled));
            let log = std::fs::read_to_string(x.event_log.as_ref().unwrap()).unwrap();
            assert!(log.lines().last().unwrap().contains("day_ended"));
        }
        assert_eq!(run_batch(&l, &[9], &quick(100.0), None).unwrap().len(), 1);
    }

    #[test]
    fn reported_distance_does_not_depend_on_day_length() {
        let l = loaded();
        let (_, a) = run_once(&l, 4, &quick(50.0)).unwrap();
        let (_, b) = run_once(&l, 4, &quick(100.0)).unwrap();
        let sa = l.instance.scale_to_working_day(50.0).unwrap();
        let sb = l.instance.scale_to_working_day(100.0).unwrap();
        let ua = sa.unscale_length(a.initial.total_distance);
        let ub = sb.unscale_length(b.initial.total_distance);
        assert_eq!(a.initial.n_vehicles, b.initial.n_vehicles);
        assert!((ua - ub).abs() < 1e-9 * ua.max(1.0), "{ua} vs {ub}");
    }
}
