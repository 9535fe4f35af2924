//! Working-day orchestration: time slices, request reveals, node commitment,
//! best-so-far repair and colony restarts.
//!
//! The day `[e_0, e_0 + t_wd]` is cut into `n_ts` slices. Slice `k` (1-based)
//! ends at `e_0 + k * t_ts`. When slice `k` begins, every visit of the
//! best-so-far solution whose service begins no later than the end of that
//! slice is committed. [`Planner`] is a step-wise state machine so a caller can
//! drive the colony between boundaries either for a fixed iteration budget
//! ([`run_working_day_virtual`]) or against a wall clock.

use alloc::vec::Vec;

use crate::acs::{AcsParams, Colony, ColonyStats, NeverStop};
use crate::construction::{fill_new_tour, i1_insertion, nearest_neighbour_solution};
use crate::local_search::iterate_local_search;
use crate::model::{Objective, Solution};
use crate::{Error, ProblemInstance, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClockMode {
    /// Slices last `t_ts` seconds of real time.
    Wall,
    /// Slices last a fixed number of colony iterations.
    #[default]
    Virtual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub t_wd: f64,
    pub n_ts: usize,
    pub clock: ClockMode,
    pub iters_per_slice: u64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            t_wd: 100.0,
            n_ts: 50,
            clock: ClockMode::Virtual,
            iters_per_slice: 200,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_ts == 0 {
            return Err(Error::InvalidParameter("at least one time slice is required"));
        }
        if !(self.t_wd > 0.0 && self.t_wd.is_finite()) {
            return Err(Error::InvalidParameter("working day length must be positive"));
        }
        Ok(())
    }

    pub fn slice_length(&self) -> f64 {
        self.t_wd / self.n_ts as f64
    }

    /// Offset of the end of slice `k` from the start of the day; exactly
    /// `t_wd` for the last slice.
    pub fn boundary(&self, k: usize) -> f64 {
        if k >= self.n_ts {
            self.t_wd
        } else {
            k as f64 * self.t_wd / self.n_ts as f64
        }
    }
}

/// Audit trail of a working day. `time` is measured in scaled instance time.
#[derive(Debug, Clone, PartialEq)]
pub enum PlannerEvent {
    DayStarted {
        available: usize,
        nv: usize,
        td: f64,
    },
    Revealed {
        slice: usize,
        time: f64,
        customers: Vec<usize>,
    },
    Committed {
        slice: usize,
        time: f64,
        tour: usize,
        position: usize,
        customer: usize,
    },
    Restarted {
        slice: usize,
        time: f64,
        n_available: usize,
        tau0: f64,
    },
    Improved {
        slice: usize,
        nv: usize,
        td: f64,
    },
    HardInfeasible {
        slice: usize,
        time: f64,
        customer: usize,
    },
    DayEnded {
        nv: usize,
        td: f64,
    },
}

/// A visit frozen by a commitment sweep, addressed in the solution it was
/// committed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Commitment {
    pub tour: usize,
    pub position: usize,
    pub customer: usize,
}

/// Extends every committed prefix over the following visits whose service
/// begins at or before `threshold`.
pub fn commitment_sweep(sol: &mut Solution, threshold: f64) -> Vec<Commitment> {
    let mut out = Vec::new();
    for t in 0..sol.tours().len() {
        let tour = sol.tour(t);
        let from = tour.committed_len();
        let to = from
            + tour.begin_times()[from..]
                .iter()
                .take_while(|&&b| b <= threshold)
                .count();
        if to == from {
            continue;
        }
        let visits: Vec<usize> = tour.visits()[from..to].to_vec();
        let idx = sol.commit_prefix(t, to).expect("prefix grows within the tour");
        out.extend(visits.into_iter().enumerate().map(|(k, customer)| Commitment {
            tour: idx,
            position: from + k,
            customer,
        }));
    }
    out
}

/// Adds newly revealed customers to `sol`: I1 insertion first, then fresh
/// nearest-neighbour tours for the leftovers, alternating until nothing is
/// left. Returns the customers no vehicle can serve, sorted.
pub fn reveal_and_repair(
    sol: Solution,
    new_ids: &[usize],
    inst: &ProblemInstance,
    params: &AcsParams,
) -> (Solution, Vec<usize>) {
    let (mut sol, mut left) = i1_insertion(sol, new_ids, inst, &params.insertion_weights);
    while !left.is_empty() && fill_new_tour(&mut sol, &mut left, inst, &params.nn_weights) {
        let (s, l) = i1_insertion(sol, &left, inst, &params.insertion_weights);
        sol = s;
        left = l;
    }
    left.sort_unstable();
    (sol, left)
}

#[derive(Debug, Clone)]
pub struct PlannerState {
    /// Index of the slice currently running, 1-based; `n_ts + 1` once the day
    /// is over.
    pub slice: usize,
    pub available: Vec<usize>,
    /// Unrevealed customers, ordered by available time then id.
    pub pending: Vec<usize>,
    pub best: Solution,
    pub hard_infeasible: Vec<usize>,
    pub events: Vec<PlannerEvent>,
}

/// Result of a full working day.
#[derive(Debug, Clone)]
pub struct DayOutcome {
    pub solution: Solution,
    /// Objective of the nearest-neighbour solution built before the day.
    pub initial: Objective,
    pub hard_infeasible: Vec<usize>,
    /// Customers whose available time lies after the end of the day.
    pub unrevealed: Vec<usize>,
    pub events: Vec<PlannerEvent>,
    pub stats: ColonyStats,
    pub restarts: usize,
}

#[derive(Debug, Clone)]
pub struct Planner {
    config: PlannerConfig,
    params: AcsParams,
    state: PlannerState,
    colony: Colony,
    start: f64,
    initial: Objective,
    stats: ColonyStats,
    restarts: usize,
}

impl Planner {
    /// Builds the a-priori solution (nearest neighbour then local search),
    /// commits what the first slice already needs and configures the colony.
    /// Customers known before the day that no vehicle can serve are an error.
    pub fn initialize_day(inst: &ProblemInstance, config: PlannerConfig, params: AcsParams) -> Result<Self> {
        config.validate()?;
        let colony = Colony::new(params.clone())?;
        let (start, _) = inst.horizon();
        let mut available = Vec::new();
        let mut pending = Vec::new();
        for c in inst.customer_ids() {
            if inst.customer(c).available_time <= 0.0 {
                available.push(c);
            } else {
                pending.push(c);
            }
        }
        pending.sort_by(|&a, &b| {
            inst.customer(a)
                .available_time
                .total_cmp(&inst.customer(b).available_time)
                .then(a.cmp(&b))
        });
        let nn = nearest_neighbour_solution(inst, &available, &params.nn_weights)?;
        let initial = nn.objective();
        let l_nn = nn.total_distance();
        let best = iterate_local_search(nn, inst);
        let mut planner = Self {
            config,
            params,
            state: PlannerState {
                slice: 1,
                available,
                pending,
                best,
                hard_infeasible: Vec::new(),
                events: Vec::new(),
            },
            colony,
            start,
            initial,
            stats: ColonyStats::default(),
            restarts: 0,
        };
        planner.state.events.push(PlannerEvent::DayStarted {
            available: planner.state.available.len(),
            nv: initial.n_vehicles,
            td: initial.total_distance,
        });
        planner.sweep(1);
        planner.colony.configure(inst, &planner.state.available, l_nn)?;
        Ok(planner)
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn state(&self) -> &PlannerState {
        &self.state
    }

    pub fn best(&self) -> &Solution {
        &self.state.best
    }

    pub fn colony(&self) -> &Colony {
        &self.colony
    }

    /// Split borrow for running the colony on the frozen configuration.
    pub fn colony_parts(&mut self) -> (&mut Colony, &mut Solution) {
        (&mut self.colony, &mut self.state.best)
    }

    pub fn is_finished(&self) -> bool {
        self.state.slice > self.config.n_ts
    }

    fn time_of(&self, k: usize) -> f64 {
        self.start + self.config.boundary(k)
    }

    fn sweep(&mut self, slice: usize) -> usize {
        let threshold = self.time_of(slice);
        let committed = commitment_sweep(&mut self.state.best, threshold);
        let n = committed.len();
        let time = self.time_of(slice - 1);
        self.state.events.extend(committed.into_iter().map(|c| PlannerEvent::Committed {
            slice,
            time,
            tour: c.tour,
            position: c.position,
            customer: c.customer,
        }));
        n
    }

    /// Records colony progress made during the running slice.
    pub fn record_slice(&mut self, stats: ColonyStats) {
        self.stats += stats;
        if stats.improvements > 0 {
            let o = self.state.best.objective();
            self.state.events.push(PlannerEvent::Improved {
                slice: self.state.slice,
                nv: o.n_vehicles,
                td: o.total_distance,
            });
        }
    }

    /// Processes the end of the running slice `k`: reveals customers known by
    /// then and, unless the day is over, commits for slice `k + 1`. If the
    /// configuration changed the colony is restarted with trails carried
    /// over. Returns whether it was restarted. The colony must be stopped.
    pub fn advance(&mut self, inst: &ProblemInstance) -> Result<bool> {
        let k = self.state.slice;
        if k > self.config.n_ts {
            return Ok(false);
        }
        let now = self.time_of(k);
        let split = self
            .state
            .pending
            .iter()
            .take_while(|&&c| inst.customer(c).available_time <= now)
            .count();
        let revealed: Vec<usize> = self.state.pending.drain(..split).collect();
        self.state.slice = k + 1;
        if !revealed.is_empty() {
            self.state.events.push(PlannerEvent::Revealed {
                slice: k + 1,
                time: now,
                customers: revealed.clone(),
            });
        }
        let last = k == self.config.n_ts;
        let n_committed = if last { 0 } else { self.sweep(k + 1) };
        if !revealed.is_empty() {
            let best = core::mem::take(&mut self.state.best);
            let (repaired, rejected) = reveal_and_repair(best, &revealed, inst, &self.params);
            self.state.best = repaired;
            for &customer in &rejected {
                self.state.events.push(PlannerEvent::HardInfeasible {
                    slice: k + 1,
                    time: now,
                    customer,
                });
            }
            self.state
                .available
                .extend(revealed.iter().copied().filter(|c| !rejected.contains(c)));
            self.state.available.sort_unstable();
            self.state.hard_infeasible.extend(rejected);
        }
        if last {
            // Visits that begin before the day closes are final.
            self.sweep(k);
            let o = self.state.best.objective();
            self.state.events.push(PlannerEvent::DayEnded {
                nv: o.n_vehicles,
                td: o.total_distance,
            });
            return Ok(false);
        }
        if revealed.is_empty() && n_committed == 0 {
            return Ok(false);
        }
        self.colony
            .configure(inst, &self.state.available, self.state.best.total_distance())?;
        self.restarts += 1;
        self.state.events.push(PlannerEvent::Restarted {
            slice: k + 1,
            time: now,
            n_available: self.state.available.len(),
            tau0: self.colony.pheromone().map_or(0.0, |p| p.tau0()),
        });
        Ok(true)
    }

    pub fn finish(self) -> DayOutcome {
        DayOutcome {
            solution: self.state.best,
            initial: self.initial,
            hard_infeasible: self.state.hard_infeasible,
            unrevealed: self.state.pending,
            events: self.state.events,
            stats: self.stats,
            restarts: self.restarts,
        }
    }
}

/// Deterministic working day: every slice runs `iters_per_slice` colony
/// iterations, then the boundary is processed.
pub fn run_working_day_virtual(
    inst: &ProblemInstance,
    config: PlannerConfig,
    params: AcsParams,
) -> Result<DayOutcome> {
    let budget = config.iters_per_slice;
    let mut planner = Planner::initialize_day(inst, config, params)?;
    while !planner.is_finished() {
        let (colony, best) = planner.colony_parts();
        let stats = colony.run(inst, best, &NeverStop, Some(budget))?;
        planner.record_slice(stats);
        planner.advance(inst)?;
    }
    Ok(planner.finish())
}
