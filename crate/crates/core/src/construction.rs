//! Construction heuristics: the time-oriented nearest neighbour heuristic that
//! builds the initial solution, and the I1 insertion rule that repairs a
//! solution with newly known or left-over customers.

use alloc::vec::Vec;

use crate::model::{Solution, Tour};
use crate::{Error, ProblemInstance, Result, DEPOT};

/// Weights of the closeness metric `m_ij = w_d d_ij + w_T T_ij + w_u u_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnWeights {
    pub distance: f64,
    pub time: f64,
    pub urgency: f64,
}

impl Default for NnWeights {
    fn default() -> Self {
        Self {
            distance: 0.4,
            time: 0.4,
            urgency: 0.2,
        }
    }
}

/// Which extreme of `c2` picks the next customer to insert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum C2Selection {
    #[default]
    Minimize,
    /// Solomon's original rule.
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionWeights {
    /// Weight of the detour term `c11`.
    pub alpha1: f64,
    /// Weight of the schedule push term `c12`.
    pub alpha2: f64,
    /// Depot distance weight in `c2`.
    pub lambda: f64,
    pub selection: C2Selection,
}

impl Default for InsertionWeights {
    fn default() -> Self {
        Self {
            alpha1: 0.1,
            alpha2: 0.9,
            lambda: 2.0,
            selection: C2Selection::Minimize,
        }
    }
}

/// Closeness of candidate `j` to the last visit `i`, where the vehicle is
/// ready to leave `i` at `ready_i = b_i + s_i`.
pub fn closeness_metric(
    i: usize,
    ready_i: f64,
    j: usize,
    inst: &ProblemInstance,
    w: &NnWeights,
) -> f64 {
    let cj = inst.customer(j);
    let d = inst.distance(i, j);
    let b_j = (ready_i + d).max(cj.ready_time);
    let wait = b_j - ready_i;
    let urgency = cj.due_date - (ready_i + d);
    w.distance * d + w.time * wait + w.urgency * urgency
}

/// Feasible customer from `candidates` with the smallest closeness to the end
/// of `tour`; ties go to the lowest id.
fn nearest_feasible(
    tour: &Tour,
    candidates: &[usize],
    inst: &ProblemInstance,
    w: &NnWeights,
) -> Option<usize> {
    let last = tour.last();
    let ready = tour.ready_time(inst);
    let mut best: Option<(f64, usize)> = None;
    for &j in candidates {
        if tour.append_begin(j, inst).is_none() {
            continue;
        }
        let m = closeness_metric(last, ready, j, inst, w);
        let better = match best {
            None => true,
            Some((bm, bj)) => m < bm || (m == bm && j < bj),
        };
        if better {
            best = Some((m, j));
        }
    }
    best.map(|(_, j)| j)
}

/// Opens a depot-started tour and fills it by repeatedly appending the
/// nearest feasible customer. Returns `false`, leaving `sol` untouched, when
/// no remaining customer fits even into the empty tour.
pub fn fill_new_tour(
    sol: &mut Solution,
    unrouted: &mut Vec<usize>,
    inst: &ProblemInstance,
    w: &NnWeights,
) -> bool {
    let mut tour = Tour::empty(inst);
    let mut visits = Vec::new();
    while let Some(j) = nearest_feasible(&tour, unrouted, inst, w) {
        visits.push(j);
        unrouted.retain(|&c| c != j);
        tour = Tour::from_visits(visits.clone(), inst);
    }
    if tour.is_empty() {
        return false;
    }
    sol.push_tour(tour);
    true
}

/// Time-oriented nearest neighbour heuristic over the `available` customers.
pub fn nearest_neighbour_solution(
    inst: &ProblemInstance,
    available: &[usize],
    w: &NnWeights,
) -> Result<Solution> {
    let mut unrouted: Vec<usize> = available.iter().copied().filter(|&c| c != DEPOT).collect();
    unrouted.sort_unstable();
    unrouted.dedup();
    let mut sol = Solution::new();
    while !unrouted.is_empty() {
        if !fill_new_tour(&mut sol, &mut unrouted, inst, w) {
            return Err(Error::InfeasibleCustomer {
                customer: unrouted[0],
            });
        }
    }
    Ok(sol)
}

/// Cheapest feasible place for one customer under `c1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionChoice {
    pub customer: usize,
    pub tour: usize,
    pub position: usize,
    pub c1: f64,
    pub c2: f64,
}

/// Best position of `u` by minimum `c1 = a1 c11 + a2 c12`; earliest tour and
/// position win ties. Committed prefixes are skipped.
pub fn best_insertion(
    sol: &Solution,
    u: usize,
    inst: &ProblemInstance,
    w: &InsertionWeights,
) -> Option<InsertionChoice> {
    let mut best: Option<InsertionChoice> = None;
    for (t_idx, tour) in sol.tours().iter().enumerate() {
        for pos in tour.committed_len()..=tour.len() {
            let Some(eff) = tour.insertion_effect(pos, u, inst) else {
                continue;
            };
            let c1 = w.alpha1 * eff.detour + w.alpha2 * (eff.successor_after - eff.successor_before);
            if best.is_none_or(|b| c1 < b.c1) {
                best = Some(InsertionChoice {
                    customer: u,
                    tour: t_idx,
                    position: pos,
                    c1,
                    c2: w.lambda * inst.distance(DEPOT, u) - c1,
                });
            }
        }
    }
    best
}

/// Next insertion of the I1 rule among `unrouted`, or `None` when nothing
/// fits anywhere.
pub fn select_insertion(
    sol: &Solution,
    unrouted: &[usize],
    inst: &ProblemInstance,
    w: &InsertionWeights,
) -> Option<InsertionChoice> {
    let mut ordered: Vec<usize> = unrouted.to_vec();
    ordered.sort_unstable();
    let mut best: Option<InsertionChoice> = None;
    for u in ordered {
        let Some(choice) = best_insertion(sol, u, inst, w) else {
            continue;
        };
        let better = match (best, w.selection) {
            (None, _) => true,
            (Some(b), C2Selection::Minimize) => choice.c2 < b.c2,
            (Some(b), C2Selection::Maximize) => choice.c2 > b.c2,
        };
        if better {
            best = Some(choice);
        }
    }
    best
}

/// Inserts customers one at a time by the I1 rule until no further feasible
/// insertion exists. Returns the repaired solution and the customers that
/// could not be placed.
pub fn i1_insertion(
    mut sol: Solution,
    unrouted: &[usize],
    inst: &ProblemInstance,
    w: &InsertionWeights,
) -> (Solution, Vec<usize>) {
    let mut remaining: Vec<usize> = unrouted.to_vec();
    while let Some(choice) = select_insertion(&sol, &remaining, inst, w) {
        sol.insert(choice.tour, choice.position, choice.customer, inst)
            .expect("selected position lies after the committed prefix");
        remaining.retain(|&c| c != choice.customer);
    }
    remaining.sort_unstable();
    (sol, remaining)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{audit, evaluate_schedule};
    use crate::synthetic::{random_instance, SyntheticSpec};
    use crate::Customer;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst_from(customers: Vec<Customer>) -> ProblemInstance {
        ProblemInstance::new("t", 100.0, 5, customers).unwrap()
    }

    #[test]
    fn weights_sum_to_one() {
        let nn = NnWeights::default();
        assert!((nn.distance + nn.time + nn.urgency - 1.0).abs() < 1e-15);
        let i1 = InsertionWeights::default();
        assert!((i1.alpha1 + i1.alpha2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closeness_formula() {
        let inst = inst_from(vec![
            Customer::new(0, (0.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            Customer::new(1, (0.0, 0.0), 1.0, (0.0, 100.0), 0.0),
            Customer::new(2, (6.0, 8.0), 1.0, (8.0, 28.0), 0.0),
        ]);
        // d = 10, vehicle ready at -2 so it arrives at 8 = e_j
        let m = closeness_metric(1, -2.0, 2, &inst, &NnWeights::default());
        assert!((m - 12.0).abs() < 1e-12);
        // co-located, window closed exactly at arrival
        let inst = inst_from(vec![
            Customer::new(0, (0.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            Customer::new(1, (3.0, 3.0), 1.0, (0.0, 100.0), 0.0),
            Customer::new(2, (3.0, 3.0), 1.0, (5.0, 5.0), 0.0),
        ]);
        let m = closeness_metric(1, 5.0, 2, &inst, &NnWeights::default());
        assert_eq!(m, 0.0);
    }

    #[test]
    fn nn_selection_matches_exhaustive_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = NnWeights::default();
        for _ in 0..200 {
            let inst = random_instance(
                &mut rng,
                &SyntheticSpec {
                    n_customers: 8,
                    ..Default::default()
                },
            );
            let k = rng.random_range(0..3);
            let visits: Vec<usize> = (1..=8).take(k).collect();
            let tour = Tour::from_visits(visits.clone(), &inst);
            if !tour.is_feasible() {
                continue;
            }
            let candidates: Vec<usize> = (k + 1..=8).collect();
            // oracle: full evaluation of every appended sequence, metric from
            // the evaluated begin times
            let mut oracle: Option<(f64, usize)> = None;
            for &j in &candidates {
                let mut seq = visits.clone();
                seq.push(j);
                let eval = evaluate_schedule(&seq, &inst);
                if !eval.is_feasible() {
                    continue;
                }
                let (i, ready) = match visits.last() {
                    Some(&i) => (i, tour.begin_times()[k - 1] + inst.customer(i).service_time),
                    None => (DEPOT, 0.0),
                };
                let d = inst.distance(i, j);
                let b_j = eval.begin[k];
                let m = 0.4 * d + 0.4 * (b_j - ready) + 0.2 * (inst.customer(j).due_date - ready - d);
                if oracle.is_none_or(|(bm, _)| m < bm) {
                    oracle = Some((m, j));
                }
            }
            assert_eq!(
                nearest_feasible(&tour, &candidates, &inst, &w),
                oracle.map(|(_, j)| j)
            );
        }
    }

    #[test]
    fn nn_trivial_cases() {
        let inst = inst_from(vec![
            Customer::new(0, (0.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            Customer::new(1, (3.0, 4.0), 1.0, (0.0, 100.0), 0.0),
        ]);
        let empty = nearest_neighbour_solution(&inst, &[], &NnWeights::default()).unwrap();
        assert_eq!(empty.tours().len(), 0);
        assert_eq!(empty.total_distance(), 0.0);
        let one = nearest_neighbour_solution(&inst, &[1], &NnWeights::default()).unwrap();
        assert_eq!(one.tours().len(), 1);
        assert_eq!(one.tour(0).visits(), &[1]);
        assert_eq!(one.total_distance(), 10.0);
    }

    #[test]
    fn nn_reports_unservable_customer() {
        let inst = inst_from(vec![
            Customer::new(0, (0.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            Customer::new(1, (3.0, 4.0), 1.0, (0.0, 100.0), 0.0),
            Customer::new(2, (30.0, 40.0), 1.0, (0.0, 10.0), 0.0),
        ]);
        assert_eq!(
            nearest_neighbour_solution(&inst, &[1, 2], &NnWeights::default()),
            Err(Error::InfeasibleCustomer { customer: 2 })
        );
    }

    #[test]
    fn nn_is_feasible_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let inst = random_instance(
                &mut rng,
                &SyntheticSpec {
                    n_customers: 20,
                    ..Default::default()
                },
            );
            let ids: Vec<usize> = inst.customer_ids().collect();
            let a = nearest_neighbour_solution(&inst, &ids, &NnWeights::default()).unwrap();
            let b = nearest_neighbour_solution(&inst, &ids, &NnWeights::default()).unwrap();
            assert_eq!(a, b);
            assert_eq!(audit(&a, &inst, &ids), Ok(()));
        }
    }

    #[test]
    fn i1_empty_input_is_noop() {
        let inst = inst_from(vec![
            Customer::new(0, (0.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            Customer::new(1, (3.0, 4.0), 1.0, (0.0, 100.0), 0.0),
        ]);
        let sol = nearest_neighbour_solution(&inst, &[1], &NnWeights::default()).unwrap();
        let (out, rest) = i1_insertion(sol.clone(), &[], &inst, &InsertionWeights::default());
        assert_eq!(out, sol);
        assert!(rest.is_empty());
    }

    #[test]
    fn collinear_detour_free_insertion() {
        // 1 at (10,0), 2 at (20,0), u = 3 at (15,0); wide windows, no service
        let inst = inst_from(vec![
            Customer::new(0, (0.0, 0.0), 0.0, (0.0, 100.0), 0.0),
            Customer::new(1, (10.0, 0.0), 1.0, (0.0, 100.0), 0.0),
            Customer::new(2, (20.0, 0.0), 1.0, (0.0, 100.0), 0.0),
            Customer::new(3, (15.0, 0.0), 1.0, (0.0, 100.0), 0.0),
        ]);
        let sol = Solution::from_visits(&[(vec![1, 2], 0)], &inst).unwrap();
        let choice = best_insertion(&sol, 3, &inst, &InsertionWeights::default()).unwrap();
        assert_eq!((choice.tour, choice.position), (0, 1));
        assert_eq!(choice.c1, 0.0);
        assert_eq!(choice.c2, 2.0 * 15.0);
    }

    /// Oracle for one I1 step: every (u, tour, position) evaluated on a
    /// mutated copy of the tour.
    fn i1_step_oracle(
        sol: &Solution,
        unrouted: &[usize],
        inst: &ProblemInstance,
        selection: C2Selection,
    ) -> Option<(usize, usize, usize)> {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        let mut ids = unrouted.to_vec();
        ids.sort_unstable();
        for &u in &ids {
            let mut best_u: Option<(f64, usize, usize)> = None;
            for (t, tour) in sol.tours().iter().enumerate() {
                let base = evaluate_schedule(tour.visits(), inst);
                for pos in tour.committed_len()..=tour.len() {
                    let mut seq = tour.visits().to_vec();
                    seq.insert(pos, u);
                    let eval = evaluate_schedule(&seq, inst);
                    if !eval.is_feasible() {
                        continue;
                    }
                    let prev = if pos == 0 { DEPOT } else { seq[pos - 1] };
                    let next = seq.get(pos + 1).copied().unwrap_or(DEPOT);
                    let c11 = inst.distance(prev, u) + inst.distance(u, next) - inst.distance(prev, next);
                    let after = eval.begin.get(pos + 1).copied().unwrap_or(eval.return_time);
                    let before = base.begin.get(pos).copied().unwrap_or(base.return_time);
                    let c1 = 0.1 * c11 + 0.9 * (after - before);
                    if best_u.is_none_or(|(b, _, _)| c1 < b) {
                        best_u = Some((c1, t, pos));
                    }
                }
            }
            if let Some((c1, t, pos)) = best_u {
                let c2 = 2.0 * inst.distance(DEPOT, u) - c1;
                let better = match (best, selection) {
                    (None, _) => true,
                    (Some((b, ..)), C2Selection::Minimize) => c2 < b,
                    (Some((b, ..)), C2Selection::Maximize) => c2 > b,
                };
                if better {
                    best = Some((c2, u, t, pos));
                }
            }
        }
        best.map(|(_, u, t, p)| (u, t, p))
    }

    #[test]
    fn i1_steps_match_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for selection in [C2Selection::Minimize, C2Selection::Maximize] {
            let w = InsertionWeights {
                selection,
                ..Default::default()
            };
            for _ in 0..60 {
                let inst = random_instance(
                    &mut rng,
                    &SyntheticSpec {
                        n_customers: 10,
                        ..Default::default()
                    },
                );
                let ids: Vec<usize> = inst.customer_ids().collect();
                let split = rng.random_range(2..8);
                let mut sol = nearest_neighbour_solution(&inst, &ids[..split], &NnWeights::default())
                    .unwrap();
                if rng.random_bool(0.5) && sol.tour(0).len() > 1 {
                    sol.commit_prefix(0, 1).unwrap();
                }
                let mut remaining = ids[split..].to_vec();
                loop {
                    let oracle = i1_step_oracle(&sol, &remaining, &inst, selection);
                    let got = select_insertion(&sol, &remaining, &inst, &w)
                        .map(|c| (c.customer, c.tour, c.position));
                    assert_eq!(got, oracle);
                    let Some((u, t, p)) = got else { break };
                    let nv = sol.n_vehicles();
                    let td = sol.total_distance();
                    let detour = {
                        let v = sol.tour(t).visits();
                        let prev = if p == 0 { DEPOT } else { v[p - 1] };
                        let next = v.get(p).copied().unwrap_or(DEPOT);
                        inst.distance(prev, u) + inst.distance(u, next) - inst.distance(prev, next)
                    };
                    sol.insert(t, p, u, &inst).unwrap();
                    remaining.retain(|&c| c != u);
                    assert_eq!(sol.n_vehicles(), nv);
                    assert!((sol.total_distance() - (td + detour)).abs() < 1e-9);
                    assert!((sol.total_distance() - sol.recompute_distance(&inst)).abs() < 1e-9);
                }
                let routed: Vec<usize> = sol.routed().collect();
                assert_eq!(audit(&sol, &inst, &routed), Ok(()));
            }
        }
    }
}
