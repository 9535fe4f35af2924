//! Exhaustive solver for tiny instances, used as a test oracle.
//!
//! Enumerates every feasible visit sequence by depth-first search, keeps the
//! shortest sequence per customer subset, then partitions the customer set
//! into routes by dynamic programming over bitmasks, minimising vehicles and
//! then distance.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Objective, Solution, Tour, FEASIBILITY_EPS};
use crate::{ProblemInstance, DEPOT};

/// Largest customer count the oracle accepts.
pub const MAX_CUSTOMERS: usize = 10;

/// Optimal solution over all customers of `inst`, or `None` when some
/// customer cannot be served or the instance is too large.
pub fn exact_solution(inst: &ProblemInstance) -> Option<Solution> {
    let ids: Vec<usize> = inst.customer_ids().collect();
    let n = ids.len();
    if n > MAX_CUSTOMERS {
        return None;
    }
    if n == 0 {
        return Some(Solution::new());
    }
    let full = (1usize << n) - 1;
    let mut route: Vec<Option<(f64, Vec<usize>)>> = vec![None; full + 1];
    let (e0, l0) = inst.horizon();
    let mut stack = Vec::new();
    explore(inst, &ids, 0, DEPOT, e0, 0.0, 0.0, l0, &mut stack, &mut route);

    let mut best: Vec<Option<(Objective, usize)>> = vec![None; full + 1];
    best[0] = Some((
        Objective {
            n_vehicles: 0,
            total_distance: 0.0,
        },
        0,
    ));
    for mask in 1..=full {
        // the lowest customer of `mask` belongs to some route: enumerate it
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let r = sub | low;
            if let (Some((len, _)), Some((prev, _))) = (&route[r], &best[mask ^ r]) {
                let cand = Objective {
                    n_vehicles: prev.n_vehicles + 1,
                    total_distance: prev.total_distance + len,
                };
                if best[mask].is_none_or(|(b, _)| cand.cmp(&b).is_lt()) {
                    best[mask] = Some((cand, r));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]?;
    let mut tours = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let (_, r) = best[mask].expect("reachable");
        let (_, visits) = route[r].as_ref().expect("feasible route");
        tours.push(Tour::from_visits(visits.clone(), inst));
        mask ^= r;
    }
    Some(Solution::from_tours(tours))
}

#[allow(clippy::too_many_arguments)]
fn explore(
    inst: &ProblemInstance,
    ids: &[usize],
    mask: usize,
    last: usize,
    ready: f64,
    load: f64,
    length: f64,
    l0: f64,
    stack: &mut Vec<usize>,
    route: &mut [Option<(f64, Vec<usize>)>],
) {
    for (bit, &c) in ids.iter().enumerate() {
        if mask & (1 << bit) != 0 {
            continue;
        }
        let cust = inst.customer(c);
        let new_load = load + cust.demand;
        if new_load > inst.capacity() + FEASIBILITY_EPS {
            continue;
        }
        let b = (ready + inst.distance(last, c)).max(cust.ready_time);
        if b > cust.due_date + FEASIBILITY_EPS {
            continue;
        }
        let finish = b + cust.service_time;
        let new_length = length + inst.distance(last, c);
        stack.push(c);
        if finish + inst.distance(c, DEPOT) <= l0 + FEASIBILITY_EPS {
            let m = mask | (1 << bit);
            let total = new_length + inst.distance(c, DEPOT);
            if route[m].as_ref().is_none_or(|(len, _)| total < *len) {
                route[m] = Some((total, stack.clone()));
            }
        }
        explore(inst, ids, mask | (1 << bit), c, finish, new_load, new_length, l0, stack, route);
        stack.pop();
    }
}
