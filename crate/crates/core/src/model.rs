//! Tours, solutions and schedule evaluation under hard capacity and time
//! window constraints.
//!
//! Every vehicle leaves the depot at the opening of the depot window `e_0`.
//! Begin-of-service times follow `b_j = max(e_j, b_i + s_i + d_ij)`, a visit is
//! late when `b_j > l_j` and a tour is late when it returns after `l_0`.
//! A tour may carry a committed prefix: visits inside it are frozen and no
//! insertion may happen before its end.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, ProblemInstance, Result, DEPOT};

/// Slack applied to time and load comparisons, absorbing rounding from the
/// time-scaling transform.
pub const FEASIBILITY_EPS: f64 = 1e-9;

/// Full left-to-right evaluation of a visit sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEval {
    pub begin: Vec<f64>,
    pub waiting: Vec<f64>,
    pub return_time: f64,
    pub load: f64,
    pub distance: f64,
    /// Positions whose begin time exceeds the due date.
    pub late_visits: Vec<usize>,
    pub late_return: bool,
    pub over_capacity: bool,
}

impl ScheduleEval {
    pub fn is_feasible(&self) -> bool {
        self.late_visits.is_empty() && !self.late_return && !self.over_capacity
    }
}

pub fn evaluate_schedule(visits: &[usize], inst: &ProblemInstance) -> ScheduleEval {
    let (e0, l0) = inst.horizon();
    let mut begin = Vec::with_capacity(visits.len());
    let mut waiting = Vec::with_capacity(visits.len());
    let mut late_visits = Vec::new();
    let mut load = 0.0;
    let mut distance = 0.0;
    let mut prev = DEPOT;
    let mut ready = e0;
    for (pos, &c) in visits.iter().enumerate() {
        let cust = inst.customer(c);
        let d = inst.distance(prev, c);
        distance += d;
        let arrival = ready + d;
        let b = if arrival < cust.ready_time { cust.ready_time } else { arrival };
        waiting.push(b - arrival);
        begin.push(b);
        if b > cust.due_date + FEASIBILITY_EPS {
            late_visits.push(pos);
        }
        load += cust.demand;
        ready = b + cust.service_time;
        prev = c;
    }
    let d = inst.distance(prev, DEPOT);
    distance += d;
    let return_time = ready + d;
    ScheduleEval {
        begin,
        waiting,
        return_time,
        load,
        distance,
        late_visits,
        late_return: return_time > l0 + FEASIBILITY_EPS,
        over_capacity: load > inst.capacity() + FEASIBILITY_EPS,
    }
}

/// Effect of inserting a customer at a given position of a feasible tour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionEffect {
    /// `d_iu + d_uj - d_ij`
    pub detour: f64,
    /// Begin of service at the inserted customer.
    pub begin: f64,
    /// Begin of service at the successor (return time when it is the depot)
    /// before and after the insertion.
    pub successor_before: f64,
    pub successor_after: f64,
}

/// One vehicle route. The depot is implicit at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    visits: Vec<usize>,
    committed: usize,
    begin: Vec<f64>,
    load: f64,
    length: f64,
    return_time: f64,
    feasible: bool,
}

impl Tour {
    pub fn empty(inst: &ProblemInstance) -> Self {
        Self::from_visits(Vec::new(), inst)
    }

    pub fn from_visits(visits: Vec<usize>, inst: &ProblemInstance) -> Self {
        let mut tour = Self {
            visits,
            committed: 0,
            begin: Vec::new(),
            load: 0.0,
            length: 0.0,
            return_time: 0.0,
            feasible: true,
        };
        tour.refresh(inst);
        tour
    }

    fn refresh(&mut self, inst: &ProblemInstance) {
        let eval = evaluate_schedule(&self.visits, inst);
        self.feasible = eval.is_feasible();
        self.begin = eval.begin;
        self.load = eval.load;
        self.length = eval.distance;
        self.return_time = eval.return_time;
    }

    pub fn visits(&self) -> &[usize] {
        &self.visits
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn committed_len(&self) -> usize {
        self.committed
    }

    pub fn committed_visits(&self) -> &[usize] {
        &self.visits[..self.committed]
    }

    pub fn begin_times(&self) -> &[f64] {
        &self.begin
    }

    pub fn load(&self) -> f64 {
        self.load
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn return_time(&self) -> f64 {
        self.return_time
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    /// Last visited node, or the depot for an empty tour.
    pub fn last(&self) -> usize {
        self.visits.last().copied().unwrap_or(DEPOT)
    }

    /// Time the vehicle is ready to leave its last node.
    pub fn ready_time(&self, inst: &ProblemInstance) -> f64 {
        match (self.visits.last(), self.begin.last()) {
            (Some(&c), Some(&b)) => b + inst.customer(c).service_time,
            _ => inst.horizon().0,
        }
    }

    /// Begin time of `customer` if it can be appended at the end of the tour
    /// without breaking capacity, its window or the depot return.
    pub fn append_begin(&self, customer: usize, inst: &ProblemInstance) -> Option<f64> {
        let cust = inst.customer(customer);
        if self.load + cust.demand > inst.capacity() + FEASIBILITY_EPS {
            return None;
        }
        let arrival = self.ready_time(inst) + inst.distance(self.last(), customer);
        let b = arrival.max(cust.ready_time);
        if b > cust.due_date + FEASIBILITY_EPS {
            return None;
        }
        let back = b + cust.service_time + inst.distance(customer, DEPOT);
        if back > inst.horizon().1 + FEASIBILITY_EPS {
            return None;
        }
        Some(b)
    }

    /// Detour and schedule push of inserting `customer` before position
    /// `pos`, or `None` when the result would be infeasible. Positions inside
    /// the committed prefix are never feasible.
    pub fn insertion_effect(
        &self,
        pos: usize,
        customer: usize,
        inst: &ProblemInstance,
    ) -> Option<InsertionEffect> {
        if pos < self.committed || pos > self.visits.len() {
            return None;
        }
        if !self.feasible {
            return self.insertion_effect_slow(pos, customer, inst);
        }
        let cust = inst.customer(customer);
        if self.load + cust.demand > inst.capacity() + FEASIBILITY_EPS {
            return None;
        }
        let (prev, ready) = if pos == 0 {
            (DEPOT, inst.horizon().0)
        } else {
            let p = self.visits[pos - 1];
            (p, self.begin[pos - 1] + inst.customer(p).service_time)
        };
        let b_u = (ready + inst.distance(prev, customer)).max(cust.ready_time);
        if b_u > cust.due_date + FEASIBILITY_EPS {
            return None;
        }
        let next = self.visits.get(pos).copied().unwrap_or(DEPOT);
        let detour = inst.distance(prev, customer) + inst.distance(customer, next)
            - inst.distance(prev, next);
        let successor_before = self.begin.get(pos).copied().unwrap_or(self.return_time);
        // Push the new schedule forward until it re-joins the cached one.
        let mut ready = b_u + cust.service_time;
        let mut from = customer;
        let mut successor_after = None;
        for k in pos..self.visits.len() {
            let c = self.visits[k];
            let cc = inst.customer(c);
            let b = (ready + inst.distance(from, c)).max(cc.ready_time);
            if successor_after.is_none() {
                successor_after = Some(b);
            }
            if b > cc.due_date + FEASIBILITY_EPS {
                return None;
            }
            if b == self.begin[k] {
                return Some(InsertionEffect {
                    detour,
                    begin: b_u,
                    successor_before,
                    successor_after: successor_after.unwrap_or(b),
                });
            }
            ready = b + cc.service_time;
            from = c;
        }
        let back = ready + inst.distance(from, DEPOT);
        if back > inst.horizon().1 + FEASIBILITY_EPS {
            return None;
        }
        Some(InsertionEffect {
            detour,
            begin: b_u,
            successor_before,
            successor_after: successor_after.unwrap_or(back),
        })
    }

    /// Tour length after replacing the visit at `pos` by `customer`, or
    /// `None` when the result would be infeasible.
    pub fn replacement_length(
        &self,
        pos: usize,
        customer: usize,
        inst: &ProblemInstance,
    ) -> Option<f64> {
        if pos < self.committed || pos >= self.visits.len() {
            return None;
        }
        let old = self.visits[pos];
        let prev = if pos == 0 { DEPOT } else { self.visits[pos - 1] };
        let next = self.visits.get(pos + 1).copied().unwrap_or(DEPOT);
        let length = self.length - inst.distance(prev, old) - inst.distance(old, next)
            + inst.distance(prev, customer)
            + inst.distance(customer, next);
        if !self.feasible {
            let mut visits = self.visits.clone();
            visits[pos] = customer;
            let eval = evaluate_schedule(&visits, inst);
            return eval.is_feasible().then_some(eval.distance);
        }
        let load = self.load - inst.customer(old).demand + inst.customer(customer).demand;
        if load > inst.capacity() + FEASIBILITY_EPS {
            return None;
        }
        let mut ready = if pos == 0 {
            inst.horizon().0
        } else {
            self.begin[pos - 1] + inst.customer(prev).service_time
        };
        let mut from = prev;
        for k in pos..self.visits.len() {
            let c = if k == pos { customer } else { self.visits[k] };
            let cc = inst.customer(c);
            let b = (ready + inst.distance(from, c)).max(cc.ready_time);
            if b > cc.due_date + FEASIBILITY_EPS {
                return None;
            }
            if k > pos && b == self.begin[k] {
                return Some(length);
            }
            ready = b + cc.service_time;
            from = c;
        }
        let back = ready + inst.distance(from, DEPOT);
        (back <= inst.horizon().1 + FEASIBILITY_EPS).then_some(length)
    }

    fn insertion_effect_slow(
        &self,
        pos: usize,
        customer: usize,
        inst: &ProblemInstance,
    ) -> Option<InsertionEffect> {
        let mut visits = self.visits.clone();
        visits.insert(pos, customer);
        let eval = evaluate_schedule(&visits, inst);
        if !eval.is_feasible() {
            return None;
        }
        let prev = if pos == 0 { DEPOT } else { self.visits[pos - 1] };
        let next = self.visits.get(pos).copied().unwrap_or(DEPOT);
        Some(InsertionEffect {
            detour: inst.distance(prev, customer) + inst.distance(customer, next)
                - inst.distance(prev, next),
            begin: eval.begin[pos],
            successor_before: self.begin.get(pos).copied().unwrap_or(self.return_time),
            successor_after: eval.begin.get(pos + 1).copied().unwrap_or(eval.return_time),
        })
    }

    fn push(&mut self, customer: usize, inst: &ProblemInstance) {
        self.visits.push(customer);
        self.refresh(inst);
    }

    fn insert(&mut self, pos: usize, customer: usize, inst: &ProblemInstance) {
        self.visits.insert(pos, customer);
        self.refresh(inst);
    }

    fn remove(&mut self, pos: usize, inst: &ProblemInstance) -> usize {
        let c = self.visits.remove(pos);
        self.refresh(inst);
        c
    }

    fn replace(&mut self, pos: usize, customer: usize, inst: &ProblemInstance) -> usize {
        let old = core::mem::replace(&mut self.visits[pos], customer);
        self.refresh(inst);
        old
    }
}

/// The lexicographic objective: vehicles first, then total distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub n_vehicles: usize,
    pub total_distance: f64,
}

impl Objective {
    pub fn cmp(&self, other: &Self) -> Ordering {
        self.n_vehicles
            .cmp(&other.n_vehicles)
            .then_with(|| self.total_distance.total_cmp(&other.total_distance))
    }

    /// Strict improvement, ignoring distance changes below rounding noise.
    pub fn improves_on(&self, other: &Self) -> bool {
        match self.n_vehicles.cmp(&other.n_vehicles) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                let tol = 1e-9 * other.total_distance.abs().max(1.0);
                self.total_distance < other.total_distance - tol
            }
        }
    }
}

/// A set of tours with a cached total distance.
///
/// Tours that carry a committed prefix are kept in front of uncommitted ones,
/// in the order they were first committed, so a committed visit keeps its
/// `(tour, position)` address for the rest of the day.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    tours: Vec<Tour>,
    total_distance: f64,
}

impl Solution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tours(tours: Vec<Tour>) -> Self {
        let total_distance = tours.iter().map(Tour::length).sum();
        Self {
            tours,
            total_distance,
        }
    }

    /// Builds a solution from plain visit lists, each paired with its
    /// committed prefix length.
    pub fn from_visits(routes: &[(Vec<usize>, usize)], inst: &ProblemInstance) -> Result<Self> {
        let mut sol = Self::new();
        for (idx, (visits, committed)) in routes.iter().enumerate() {
            sol.push_tour(Tour::from_visits(visits.clone(), inst));
            sol.commit_prefix(idx, *committed)?;
        }
        Ok(sol)
    }

    pub fn tours(&self) -> &[Tour] {
        &self.tours
    }

    pub fn tour(&self, idx: usize) -> &Tour {
        &self.tours[idx]
    }

    /// Number of non-empty tours.
    pub fn n_vehicles(&self) -> usize {
        self.tours.iter().filter(|t| !t.is_empty()).count()
    }

    pub fn total_distance(&self) -> f64 {
        self.total_distance
    }

    pub fn objective(&self) -> Objective {
        Objective {
            n_vehicles: self.n_vehicles(),
            total_distance: self.total_distance,
        }
    }

    pub fn recompute_distance(&self, inst: &ProblemInstance) -> f64 {
        self.tours
            .iter()
            .map(|t| evaluate_schedule(t.visits(), inst).distance)
            .sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.tours.iter().all(Tour::is_feasible)
    }

    pub fn n_routed(&self) -> usize {
        self.tours.iter().map(Tour::len).sum()
    }

    pub fn routed(&self) -> impl Iterator<Item = usize> + '_ {
        self.tours.iter().flat_map(|t| t.visits().iter().copied())
    }

    /// Number of leading tours that carry a committed prefix.
    pub fn n_committed_tours(&self) -> usize {
        self.tours.iter().take_while(|t| t.committed_len() > 0).count()
    }

    pub fn push_tour(&mut self, tour: Tour) -> usize {
        self.total_distance += tour.length();
        self.tours.push(tour);
        self.tours.len() - 1
    }

    fn update_tour<R>(&mut self, idx: usize, f: impl FnOnce(&mut Tour) -> R) -> R {
        let before = self.tours[idx].length();
        let r = f(&mut self.tours[idx]);
        self.total_distance += self.tours[idx].length() - before;
        r
    }

    fn check_mutable(&self, tour: usize, pos: usize) -> Result<()> {
        let t = self.tours.get(tour).ok_or(Error::NoSuchTour(tour))?;
        if pos < t.committed_len() {
            return Err(Error::CommittedPosition {
                tour,
                position: pos,
            });
        }
        Ok(())
    }

    pub fn append(&mut self, tour: usize, customer: usize, inst: &ProblemInstance) -> Result<()> {
        if tour >= self.tours.len() {
            return Err(Error::NoSuchTour(tour));
        }
        self.update_tour(tour, |t| t.push(customer, inst));
        Ok(())
    }

    /// Inserts before `pos`; `pos` must not lie inside the committed prefix.
    pub fn insert(
        &mut self,
        tour: usize,
        pos: usize,
        customer: usize,
        inst: &ProblemInstance,
    ) -> Result<()> {
        self.check_mutable(tour, pos)?;
        if pos > self.tours[tour].len() {
            return Err(Error::InvalidParameter("insertion position past tour end"));
        }
        self.update_tour(tour, |t| t.insert(pos, customer, inst));
        Ok(())
    }

    pub fn remove(&mut self, tour: usize, pos: usize, inst: &ProblemInstance) -> Result<usize> {
        self.check_mutable(tour, pos)?;
        if pos >= self.tours[tour].len() {
            return Err(Error::InvalidParameter("removal position past tour end"));
        }
        Ok(self.update_tour(tour, |t| t.remove(pos, inst)))
    }

    pub fn replace(
        &mut self,
        tour: usize,
        pos: usize,
        customer: usize,
        inst: &ProblemInstance,
    ) -> Result<usize> {
        self.check_mutable(tour, pos)?;
        if pos >= self.tours[tour].len() {
            return Err(Error::InvalidParameter("position past tour end"));
        }
        Ok(self.update_tour(tour, |t| t.replace(pos, customer, inst)))
    }

    /// Moves the visit at `(from, from_pos)` to `(to, to_pos)`, where `to_pos`
    /// indexes the target tour before removal.
    pub fn relocate(
        &mut self,
        (from, from_pos): (usize, usize),
        (to, to_pos): (usize, usize),
        inst: &ProblemInstance,
    ) -> Result<()> {
        self.check_mutable(from, from_pos)?;
        self.check_mutable(to, to_pos)?;
        if from == to {
            return Err(Error::InvalidParameter("relocation within one tour"));
        }
        let c = self.remove(from, from_pos, inst)?;
        self.insert(to, to_pos, c, inst)
    }

    /// Swaps two visits living in different tours.
    pub fn exchange(
        &mut self,
        (a, a_pos): (usize, usize),
        (b, b_pos): (usize, usize),
        inst: &ProblemInstance,
    ) -> Result<()> {
        self.check_mutable(a, a_pos)?;
        self.check_mutable(b, b_pos)?;
        let ca = self.tours[a].visits()[a_pos];
        let cb = self.tours[b].visits()[b_pos];
        self.replace(a, a_pos, cb, inst)?;
        self.replace(b, b_pos, ca, inst)?;
        Ok(())
    }

    /// Freezes the first `len` visits of a tour. Prefixes only grow. A tour
    /// that becomes committed for the first time moves to the end of the
    /// committed block so committed addresses stay stable.
    pub fn commit_prefix(&mut self, tour: usize, len: usize) -> Result<usize> {
        let t = self.tours.get(tour).ok_or(Error::NoSuchTour(tour))?;
        if len < t.committed {
            return Err(Error::PrefixShrink {
                tour,
                current: t.committed,
                requested: len,
            });
        }
        if len > t.len() {
            return Err(Error::PrefixTooLong {
                tour,
                requested: len,
                len: t.len(),
            });
        }
        if len == t.committed {
            return Ok(tour);
        }
        let newly = t.committed == 0;
        self.tours[tour].committed = len;
        if !newly {
            return Ok(tour);
        }
        let block = self.tours[..tour]
            .iter()
            .take_while(|t| t.committed > 0)
            .count();
        if block < tour {
            let t = self.tours.remove(tour);
            self.tours.insert(block, t);
        }
        Ok(block)
    }

    /// Drops tours without visits. Empty tours never carry a commitment.
    pub fn remove_empty_tours(&mut self) {
        self.tours.retain(|t| !t.is_empty());
    }

    /// A copy holding only the committed prefixes, as ants start from.
    pub fn committed_skeleton(&self, inst: &ProblemInstance) -> Solution {
        let tours = self
            .tours
            .iter()
            .filter(|t| t.committed_len() > 0)
            .map(|t| {
                let mut s = Tour::from_visits(t.committed_visits().to_vec(), inst);
                s.committed = t.committed_len();
                s
            })
            .collect();
        Solution::from_tours(tours)
    }
}

pub fn compare_solutions(a: &Solution, b: &Solution) -> Ordering {
    a.objective().cmp(&b.objective())
}

/// Whether inserting `customer` before `position` keeps the tour feasible.
pub fn is_feasible_insertion(
    tour: &Tour,
    position: usize,
    customer: usize,
    inst: &ProblemInstance,
) -> bool {
    tour.insertion_effect(position, customer, inst).is_some()
}

/// First defect found by [`audit`].
#[derive(Debug, Clone, PartialEq)]
pub enum AuditViolation {
    Infeasible { tour: usize },
    StaleCache { tour: usize },
    Duplicate { customer: usize },
    Missing { customer: usize },
    Unexpected { customer: usize },
    DepotInTour { tour: usize },
    CommittedNotLeading { tour: usize },
    DistanceDrift { cached: f64, recomputed: f64 },
}

/// Recomputes every schedule from scratch and checks that the solution is
/// feasible, routes exactly `expected` and that cached values agree.
pub fn audit(
    sol: &Solution,
    inst: &ProblemInstance,
    expected: &[usize],
) -> core::result::Result<(), AuditViolation> {
    let mut seen = vec![false; inst.n_nodes()];
    let mut in_committed_block = true;
    for (idx, tour) in sol.tours().iter().enumerate() {
        if tour.committed_len() > 0 && !in_committed_block {
            return Err(AuditViolation::CommittedNotLeading { tour: idx });
        }
        if tour.committed_len() == 0 {
            in_committed_block = false;
        }
        let eval = evaluate_schedule(tour.visits(), inst);
        if !eval.is_feasible() {
            return Err(AuditViolation::Infeasible { tour: idx });
        }
        if eval.begin != tour.begin_times() || !tour.is_feasible() {
            return Err(AuditViolation::StaleCache { tour: idx });
        }
        for &c in tour.visits() {
            if c == DEPOT {
                return Err(AuditViolation::DepotInTour { tour: idx });
            }
            if core::mem::replace(&mut seen[c], true) {
                return Err(AuditViolation::Duplicate { customer: c });
            }
        }
    }
    let mut wanted = vec![false; inst.n_nodes()];
    for &c in expected {
        wanted[c] = true;
        if !seen[c] {
            return Err(AuditViolation::Missing { customer: c });
        }
    }
    if let Some(c) = (1..inst.n_nodes()).find(|&c| seen[c] && !wanted[c]) {
        return Err(AuditViolation::Unexpected { customer: c });
    }
    let recomputed = sol.recompute_distance(inst);
    let cached = sol.total_distance();
    if (cached - recomputed).abs() > 1e-9 * recomputed.abs().max(1.0) {
        return Err(AuditViolation::DistanceDrift { cached, recomputed });
    }
    Ok(())
}
