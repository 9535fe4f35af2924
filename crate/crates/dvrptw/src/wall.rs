//! Wall-clock working day: the colony runs on its own thread while the
//! planner sleeps until the next slice boundary, raises the stop flag, waits
//! for the colony to return the best solution and then processes the boundary.

use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use dvrptw_core::acs::AcsParams;
use dvrptw_core::planner::{DayOutcome, Planner, PlannerConfig};
use dvrptw_core::ProblemInstance;

/// Runs a day of `t_wd` seconds. The instance must already be scaled so
/// that one time unit is one second.
pub fn run_working_day_wall(
    inst: &ProblemInstance,
    config: PlannerConfig,
    params: AcsParams,
) -> dvrptw_core::Result<DayOutcome> {
    let start = Instant::now();
    let mut planner = Planner::initialize_day(inst, config, params)?;
    while !planner.is_finished() {
        let k = planner.state().slice;
        let deadline = start + Duration::from_secs_f64(planner.config().boundary(k));
        let stop = AtomicBool::new(false);
        let (colony, best) = planner.colony_parts();
        let stats = thread::scope(|s| {
            let worker = s.spawn(|| colony.run(inst, best, &stop, None));
            let now = Instant::now();
            if deadline > now {
                thread::sleep(deadline - now);
            }
            stop.store(true, Ordering::Release);
            worker.join().expect("colony thread panicked")
        })?;
        planner.record_slice(stats);
        planner.advance(inst)?;
    }
    Ok(planner.finish())
}
