//! Single-colony Ant Colony System with joint route construction.
//!
//! Every ant grows all of its vehicle tours at once: each step picks the
//! (vehicle, customer) pair from all tours and all feasible candidates, using
//! the ACS pseudo-random proportional rule on `tau^alpha * eta^beta` with
//! `eta = 1 / m` from the nearest-neighbour closeness metric. Ants start from
//! the committed prefixes of the best-so-far solution. When no tour can be
//! extended and few customers remain, the I1 insertion rule places them
//! before a new tour is opened.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construction::{closeness_metric, i1_insertion, InsertionWeights, NnWeights};
use crate::local_search::iterate_local_search;
use crate::model::{compare_solutions, Solution, Tour};
use crate::pheromone::{initial_level, PheromoneState};
use crate::{Error, ProblemInstance, Result, DEPOT};

#[derive(Debug, Clone, PartialEq)]
pub struct AcsParams {
    pub q0: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Decay used by both the local and the global update.
    pub rho: f64,
    /// Weight of the new initial level when trails are carried over a restart.
    pub rho_preserve: f64,
    pub n_ants: usize,
    pub candidate_list_size: usize,
    /// A stalled ant runs the insertion heuristic only when at most this many
    /// customers are left.
    pub insertion_threshold: usize,
    /// Lower clamp on the closeness metric before it is inverted.
    pub eta_floor: f64,
    pub seed: u64,
    pub nn_weights: NnWeights,
    pub insertion_weights: InsertionWeights,
}

impl Default for AcsParams {
    fn default() -> Self {
        Self {
            q0: 0.9,
            alpha: 1.0,
            beta: 1.0,
            rho: 0.9,
            rho_preserve: 0.3,
            n_ants: 10,
            candidate_list_size: 20,
            insertion_threshold: 10,
            eta_floor: 1e-10,
            seed: 0,
            nn_weights: NnWeights::default(),
            insertion_weights: InsertionWeights::default(),
        }
    }
}

impl AcsParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q0) {
            return Err(Error::InvalidParameter("q0 must lie in [0, 1]"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter("rho must lie in (0, 1)"));
        }
        if !(self.rho_preserve > 0.0 && self.rho_preserve < 1.0) {
            return Err(Error::InvalidParameter("rho_preserve must lie in (0, 1)"));
        }
        if self.n_ants == 0 {
            return Err(Error::InvalidParameter("at least one ant is required"));
        }
        if self.candidate_list_size == 0 {
            return Err(Error::InvalidParameter("candidate list size must be at least 1"));
        }
        if !(self.eta_floor > 0.0) {
            return Err(Error::InvalidParameter("eta floor must be positive"));
        }
        Ok(())
    }
}

/// Cooperative cancellation, polled between ant constructions.
pub trait StopSignal {
    fn should_stop(&self) -> bool;
}

impl StopSignal for AtomicBool {
    fn should_stop(&self) -> bool {
        self.load(AtomicOrdering::Acquire)
    }
}

/// Never requests a stop; pair it with an iteration budget.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeverStop;

impl StopSignal for NeverStop {
    fn should_stop(&self) -> bool {
        false
    }
}

/// One feasible (vehicle, customer) pair and its attractiveness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub vehicle: usize,
    pub customer: usize,
    pub score: f64,
}

/// Selection probabilities of the exploration branch.
pub fn transition_probabilities(candidates: &[Candidate]) -> Vec<f64> {
    let total: f64 = candidates.iter().map(|c| c.score).sum();
    candidates.iter().map(|c| c.score / total).collect()
}

/// Pseudo-random proportional rule: with probability `q0` the best-scoring
/// pair (first one on ties), otherwise a roulette-wheel draw.
pub fn choose_candidate<R: Rng + ?Sized>(candidates: &[Candidate], q0: f64, rng: &mut R) -> Option<usize> {
    if candidates.is_empty() {
        return None;
    }
    if candidates.len() == 1 {
        return Some(0);
    }
    if rng.random::<f64>() < q0 {
        let mut best = 0;
        for (k, c) in candidates.iter().enumerate().skip(1) {
            if c.score > candidates[best].score {
                best = k;
            }
        }
        return Some(best);
    }
    let total: f64 = candidates.iter().map(|c| c.score).sum();
    let mut pick = rng.random::<f64>() * total;
    for (k, c) in candidates.iter().enumerate() {
        pick -= c.score;
        if pick < 0.0 {
            return Some(k);
        }
    }
    Some(candidates.len() - 1)
}

#[inline]
fn power(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else {
        libm::pow(x, e)
    }
}

/// Counters reported by [`Colony::run`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ColonyStats {
    pub iterations: u64,
    /// Complete feasible solutions built by ants.
    pub feasible_solutions: u64,
    pub improvements: u64,
}

impl core::ops::AddAssign for ColonyStats {
    fn add_assign(&mut self, o: Self) {
        self.iterations += o.iterations;
        self.feasible_solutions += o.feasible_solutions;
        self.improvements += o.improvements;
    }
}

/// Colony state that survives restarts: trails, random stream and the
/// current problem configuration.
#[derive(Debug, Clone)]
pub struct Colony {
    params: AcsParams,
    pheromone: Option<PheromoneState>,
    rng: ChaCha8Rng,
    available: Vec<usize>,
    candidates: Vec<Candidate>,
}

impl Colony {
    pub fn new(params: AcsParams) -> Result<Self> {
        params.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(params.seed);
        Ok(Self {
            params,
            pheromone: None,
            rng,
            available: Vec::new(),
            candidates: Vec::new(),
        })
    }

    pub fn params(&self) -> &AcsParams {
        &self.params
    }

    pub fn pheromone(&self) -> Option<&PheromoneState> {
        self.pheromone.as_ref()
    }

    pub fn available(&self) -> &[usize] {
        &self.available
    }

    /// Installs a new problem configuration. The first call initialises the
    /// trails at `1 / (n_av * reference_length)`; later calls blend the old
    /// trails toward the new level. An empty configuration, or one with zero
    /// reference length, leaves the colony idle.
    pub fn configure(
        &mut self,
        inst: &ProblemInstance,
        available: &[usize],
        reference_length: f64,
    ) -> Result<()> {
        self.available = available.to_vec();
        self.available.sort_unstable();
        if self.available.is_empty() || !(reference_length > 0.0) {
            return Ok(());
        }
        let tau0 = initial_level(self.available.len(), reference_length)?;
        match &mut self.pheromone {
            Some(p) => p.preserve(tau0, self.params.rho_preserve),
            None => {
                self.pheromone = Some(PheromoneState::new(
                    inst,
                    self.available.len(),
                    reference_length,
                    self.params.candidate_list_size,
                )?)
            }
        }
        Ok(())
    }

    fn is_idle(&self) -> bool {
        self.pheromone.is_none() || self.available.is_empty()
    }

    /// Fills `self.candidates` with every feasible (vehicle, customer) pair,
    /// candidate lists first. Returns false when there is none.
    fn collect_candidates(&mut self, sol: &Solution, unrouted: &[bool], inst: &ProblemInstance) -> bool {
        let pheromone = self.pheromone.as_ref().expect("colony configured");
        let p = &self.params;
        self.candidates.clear();
        for (v, tour) in sol.tours().iter().enumerate() {
            let r = tour.last();
            let ready = tour.ready_time(inst);
            let before = self.candidates.len();
            let push = |s: usize, out: &mut Vec<Candidate>| {
                if s == DEPOT || !unrouted[s] || tour.append_begin(s, inst).is_none() {
                    return;
                }
                let m = closeness_metric(r, ready, s, inst, &p.nn_weights).max(p.eta_floor);
                let score = power(pheromone.get(r, s), p.alpha) * power(1.0 / m, p.beta);
                out.push(Candidate {
                    vehicle: v,
                    customer: s,
                    score,
                });
            };
            for &s in pheromone.candidates(r) {
                push(s, &mut self.candidates);
            }
            if self.candidates.len() == before {
                for s in 1..inst.n_nodes() {
                    push(s, &mut self.candidates);
                }
            }
        }
        !self.candidates.is_empty()
    }

    /// Every feasible (vehicle, customer) pair of the current construction
    /// state with its score; empty on a stall.
    pub fn feasible_candidates(&mut self, sol: &Solution, unrouted: &[bool], inst: &ProblemInstance) -> &[Candidate] {
        if self.is_idle() {
            self.candidates.clear();
        } else {
            self.collect_candidates(sol, unrouted, inst);
        }
        &self.candidates
    }

    /// Picks the next (vehicle, customer) pair, or `None` on a stall.
    pub fn joint_transition(
        &mut self,
        sol: &Solution,
        unrouted: &[bool],
        inst: &ProblemInstance,
    ) -> Option<(usize, usize)> {
        if !self.collect_candidates(sol, unrouted, inst) {
            return None;
        }
        let k = choose_candidate(&self.candidates, self.params.q0, &mut self.rng)?;
        let c = self.candidates[k];
        Some((c.vehicle, c.customer))
    }

    /// Builds one complete feasible solution routing `skeleton`'s committed
    /// prefixes plus every available customer not already in them.
    pub fn construct_ant_solution(
        &mut self,
        inst: &ProblemInstance,
        skeleton: &Solution,
    ) -> Result<Solution> {
        let mut sol = skeleton.clone();
        let mut unrouted = vec![false; inst.n_nodes()];
        for &c in &self.available {
            unrouted[c] = true;
        }
        for c in sol.routed() {
            unrouted[c] = false;
        }
        let mut remaining = unrouted.iter().filter(|&&u| u).count();
        if remaining == 0 {
            return Ok(sol);
        }
        if sol.tours().is_empty() {
            sol.push_tour(Tour::empty(inst));
        }
        let rho = self.params.rho;
        while remaining > 0 {
            if let Some((v, s)) = self.joint_transition(&sol, &unrouted, inst) {
                let r = sol.tour(v).last();
                sol.append(v, s, inst)?;
                if let Some(p) = self.pheromone.as_mut() {
                    p.local_update(r, s, rho);
                }
                unrouted[s] = false;
                remaining -= 1;
                continue;
            }
            if remaining <= self.params.insertion_threshold {
                let left: Vec<usize> = (1..inst.n_nodes()).filter(|&c| unrouted[c]).collect();
                let (repaired, rest) = i1_insertion(sol, &left, inst, &self.params.insertion_weights);
                sol = repaired;
                for &c in &left {
                    unrouted[c] = false;
                }
                for &c in &rest {
                    unrouted[c] = true;
                }
                remaining = rest.len();
                if remaining == 0 {
                    break;
                }
            }
            if sol.tours().last().is_some_and(Tour::is_empty) {
                let customer = (1..inst.n_nodes()).find(|&c| unrouted[c]).unwrap_or(DEPOT);
                return Err(Error::InfeasibleCustomer { customer });
            }
            sol.push_tour(Tour::empty(inst));
        }
        sol.remove_empty_tours();
        Ok(sol)
    }

    /// Runs ACS iterations on the current configuration, improving `best` in
    /// place, until `stop` fires or `max_iterations` complete. The stop signal
    /// is polled before every ant; an interrupted iteration is discarded.
    pub fn run(
        &mut self,
        inst: &ProblemInstance,
        best: &mut Solution,
        stop: &dyn StopSignal,
        max_iterations: Option<u64>,
    ) -> Result<ColonyStats> {
        let mut stats = ColonyStats::default();
        if self.is_idle() {
            return Ok(stats);
        }
        let skeleton = best.committed_skeleton(inst);
        loop {
            if max_iterations.is_some_and(|m| stats.iterations >= m) || stop.should_stop() {
                return Ok(stats);
            }
            let mut iteration_best: Option<Solution> = None;
            for _ in 0..self.params.n_ants {
                if stop.should_stop() {
                    return Ok(stats);
                }
                let ant = self.construct_ant_solution(inst, &skeleton)?;
                stats.feasible_solutions += 1;
                let better = match &iteration_best {
                    None => true,
                    Some(b) => compare_solutions(&ant, b).is_lt(),
                };
                if better {
                    iteration_best = Some(ant);
                }
            }
            let improved = iterate_local_search(iteration_best.expect("at least one ant"), inst);
            if improved.objective().improves_on(&best.objective()) {
                *best = improved;
                stats.improvements += 1;
            }
            if let Some(p) = self.pheromone.as_mut() {
                p.global_update(best, self.params.rho);
            }
            stats.iterations += 1;
        }
    }
}
