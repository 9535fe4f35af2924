//! Pheromone trail matrix and nearest-neighbour candidate lists.
//!
//! The matrix is symmetric: every update writes both `(r, s)` and `(s, r)`.

use alloc::vec::Vec;

use crate::model::Solution;
use crate::{Error, ProblemInstance, Result, DEPOT};

/// `tau0 = 1 / (n_av * length)`.
pub fn initial_level(n_available: usize, reference_length: f64) -> Result<f64> {
    if n_available == 0 {
        return Err(Error::InvalidParameter("no available customers"));
    }
    if !(reference_length > 0.0) {
        return Err(Error::ZeroReferenceLength);
    }
    Ok(1.0 / (n_available as f64 * reference_length))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    n: usize,
    tau: Vec<f64>,
    tau0: f64,
    candidates: Vec<Vec<usize>>,
}

impl PheromoneState {
    /// Uniform trails at `tau0 = 1 / (n_av * reference_length)`.
    pub fn new(
        inst: &ProblemInstance,
        n_available: usize,
        reference_length: f64,
        candidate_list_size: usize,
    ) -> Result<Self> {
        let tau0 = initial_level(n_available, reference_length)?;
        if candidate_list_size == 0 {
            return Err(Error::InvalidParameter("candidate list size must be at least 1"));
        }
        let n = inst.n_nodes();
        Ok(Self {
            n,
            tau: alloc::vec![tau0; n * n],
            tau0,
            candidates: candidate_lists(inst, candidate_list_size),
        })
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    #[inline]
    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.tau[r * self.n + s]
    }

    fn set(&mut self, r: usize, s: usize, value: f64) {
        self.tau[r * self.n + s] = value;
        self.tau[s * self.n + r] = value;
    }

    /// The `cl` nodes closest to `node`, nearest first.
    pub fn candidates(&self, node: usize) -> &[usize] {
        &self.candidates[node]
    }

    pub fn min(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.tau.iter().sum()
    }

    /// Blends the old trails toward a new initial level on colony restart:
    /// `tau = (1 - rho) tau_old + rho tau0_new`.
    pub fn preserve(&mut self, tau0_new: f64, rho_preserve: f64) {
        for t in &mut self.tau {
            *t = (1.0 - rho_preserve) * *t + rho_preserve * tau0_new;
        }
        self.tau0 = tau0_new;
    }

    /// Local update after an ant moves from `r` to `s`:
    /// `tau_rs = (1 - rho) tau_rs + rho tau0`.
    pub fn local_update(&mut self, r: usize, s: usize, rho: f64) {
        let v = (1.0 - rho) * self.get(r, s) + rho * self.tau0;
        self.set(r, s, v);
    }

    /// Reinforces each distinct edge of `best` (depot legs included) with
    /// `1 / L_gb`; all other entries stay untouched.
    pub fn global_update(&mut self, best: &Solution, rho: f64) {
        let length = best.total_distance();
        if !(length > 0.0) {
            return;
        }
        let deposit = 1.0 / length;
        for (r, s) in distinct_edges(best) {
            let v = (1.0 - rho) * self.get(r, s) + rho * deposit;
            self.set(r, s, v);
        }
    }
}

/// Undirected edges travelled by a solution, each reported once as
/// `(min, max)` in first-seen order.
pub fn distinct_edges(sol: &Solution) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for tour in sol.tours().iter().filter(|t| !t.is_empty()) {
        let mut prev = DEPOT;
        for &c in tour.visits().iter().chain(core::iter::once(&DEPOT)) {
            let e = (prev.min(c), prev.max(c));
            if !edges.contains(&e) {
                edges.push(e);
            }
            prev = c;
        }
    }
    edges
}

fn candidate_lists(inst: &ProblemInstance, cl: usize) -> Vec<Vec<usize>> {
    let n = inst.n_nodes();
    (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| {
                inst.distance(i, a)
                    .total_cmp(&inst.distance(i, b))
                    .then(a.cmp(&b))
            });
            others.truncate(cl);
            others
        })
        .collect()
}
