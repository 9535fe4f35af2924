//! Inter-route local search with the relocate and exchange operators.
//!
//! Moves never touch committed visits and never insert in front of one. A
//! move is accepted only when it strictly improves the lexicographic
//! (vehicles, distance) objective; a relocation that empties its source tour
//! removes that tour.

use alloc::vec::Vec;

use crate::model::{Objective, Solution, Tour};
use crate::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Relocate,
    Exchange,
}

/// A single inter-route move. For a relocation, `target.1` is the insertion
/// position in the target tour before the move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub delta_distance: f64,
    pub delta_vehicles: isize,
}

impl MoveRecord {
    fn objective_after(&self, before: Objective) -> Objective {
        Objective {
            n_vehicles: (before.n_vehicles as isize + self.delta_vehicles) as usize,
            total_distance: before.total_distance + self.delta_distance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanPolicy {
    /// Take the first improving move in scan order (tours, then positions,
    /// ascending).
    #[default]
    FirstImprovement,
    /// Take the move with the best resulting objective; earliest wins ties.
    BestImprovement,
}

struct Scan {
    policy: ScanPolicy,
    before: Objective,
    best: Option<(Objective, MoveRecord)>,
}

impl Scan {
    fn new(policy: ScanPolicy, before: Objective) -> Self {
        Self {
            policy,
            before,
            best: None,
        }
    }

    /// Offers a candidate; returns true when the scan can stop.
    fn offer(&mut self, mv: MoveRecord) -> bool {
        let after = mv.objective_after(self.before);
        if !after.improves_on(&self.before) {
            return false;
        }
        match self.policy {
            ScanPolicy::FirstImprovement => {
                self.best = Some((after, mv));
                true
            }
            ScanPolicy::BestImprovement => {
                if self.best.is_none_or(|(b, _)| after.improves_on(&b)) {
                    self.best = Some((after, mv));
                }
                false
            }
        }
    }

    fn into_move(self) -> Option<MoveRecord> {
        self.best.map(|(_, m)| m)
    }
}

/// Finds an improving relocation of one visit into another tour.
pub fn find_relocate(
    sol: &Solution,
    inst: &ProblemInstance,
    policy: ScanPolicy,
) -> Option<MoveRecord> {
    let mut scan = Scan::new(policy, sol.objective());
    for (a, src) in sol.tours().iter().enumerate() {
        for i in src.committed_len()..src.len() {
            let u = src.visits()[i];
            let mut rest: Vec<usize> = src.visits().to_vec();
            rest.remove(i);
            let reduced = Tour::from_visits(rest, inst);
            if !reduced.is_feasible() {
                continue;
            }
            let removal = reduced.length() - src.length();
            let delta_vehicles = if reduced.is_empty() { -1 } else { 0 };
            for (b, dst) in sol.tours().iter().enumerate() {
                if b == a || dst.is_empty() {
                    continue;
                }
                for p in dst.committed_len()..=dst.len() {
                    let Some(eff) = dst.insertion_effect(p, u, inst) else {
                        continue;
                    };
                    let mv = MoveRecord {
                        kind: MoveKind::Relocate,
                        source: (a, i),
                        target: (b, p),
                        delta_distance: removal + eff.detour,
                        delta_vehicles,
                    };
                    if scan.offer(mv) {
                        return scan.into_move();
                    }
                }
            }
        }
    }
    scan.into_move()
}

/// Finds an improving swap of two visits from different tours.
pub fn find_exchange(
    sol: &Solution,
    inst: &ProblemInstance,
    policy: ScanPolicy,
) -> Option<MoveRecord> {
    let mut scan = Scan::new(policy, sol.objective());
    let tours = sol.tours();
    for (a, ta) in tours.iter().enumerate() {
        for i in ta.committed_len()..ta.len() {
            let u = ta.visits()[i];
            for (b, tb) in tours.iter().enumerate().skip(a + 1) {
                for j in tb.committed_len()..tb.len() {
                    let w = tb.visits()[j];
                    let Some(len_a) = ta.replacement_length(i, w, inst) else {
                        continue;
                    };
                    let Some(len_b) = tb.replacement_length(j, u, inst) else {
                        continue;
                    };
                    let mv = MoveRecord {
                        kind: MoveKind::Exchange,
                        source: (a, i),
                        target: (b, j),
                        delta_distance: (len_a - ta.length()) + (len_b - tb.length()),
                        delta_vehicles: 0,
                    };
                    if scan.offer(mv) {
                        return scan.into_move();
                    }
                }
            }
        }
    }
    scan.into_move()
}

/// Applies a move found on `sol`. Tours emptied by a relocation are removed.
pub fn apply_move(sol: &mut Solution, mv: &MoveRecord, inst: &ProblemInstance) {
    match mv.kind {
        MoveKind::Relocate => {
            sol.relocate(mv.source, mv.target, inst)
                .expect("relocation generated outside committed prefixes");
            sol.remove_empty_tours();
        }
        MoveKind::Exchange => {
            sol.exchange(mv.source, mv.target, inst)
                .expect("exchange generated outside committed prefixes");
        }
    }
}

pub fn relocate_move(sol: &Solution, inst: &ProblemInstance) -> Option<Solution> {
    let mv = find_relocate(sol, inst, ScanPolicy::FirstImprovement)?;
    let mut out = sol.clone();
    apply_move(&mut out, &mv, inst);
    Some(out)
}

pub fn exchange_move(sol: &Solution, inst: &ProblemInstance) -> Option<Solution> {
    let mv = find_exchange(sol, inst, ScanPolicy::FirstImprovement)?;
    let mut out = sol.clone();
    apply_move(&mut out, &mv, inst);
    Some(out)
}

/// Alternates relocate and exchange passes until a full cycle finds no
/// improving move.
pub fn iterate_local_search(mut sol: Solution, inst: &ProblemInstance) -> Solution {
    iterate_with_policy(&mut sol, inst, ScanPolicy::FirstImprovement);
    sol
}

/// In-place variant of [`iterate_local_search`]; returns the number of moves
/// applied.
pub fn iterate_with_policy(sol: &mut Solution, inst: &ProblemInstance, policy: ScanPolicy) -> usize {
    let mut applied = 0;
    loop {
        let mut improved = false;
        while let Some(mv) = find_relocate(sol, inst, policy) {
            apply_move(sol, &mv, inst);
            applied += 1;
            improved = true;
        }
        while let Some(mv) = find_exchange(sol, inst, policy) {
            apply_move(sol, &mv, inst);
            applied += 1;
            improved = true;
        }
        if !improved {
            return applied;
        }
    }
}
