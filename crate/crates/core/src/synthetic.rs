//! Seeded generator for small Solomon-like instances, used by tests and for
//! quick experiments when no benchmark file is at hand.
//!
//! Every generated customer can be served by a dedicated vehicle.

use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;

use crate::{Customer, ProblemInstance};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n_customers: usize,
    /// Side of the square the customers are drawn from; the depot sits in
    /// the middle.
    pub grid: f64,
    pub capacity: f64,
    pub max_demand: u32,
    pub horizon: f64,
    pub service_time: f64,
    pub min_window: f64,
    pub max_window: f64,
    /// Fraction of customers revealed during the day.
    pub dynamicity: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_customers: 10,
            grid: 100.0,
            capacity: 50.0,
            max_demand: 20,
            horizon: 240.0,
            service_time: 10.0,
            min_window: 20.0,
            max_window: 120.0,
            dynamicity: 0.0,
        }
    }
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, spec: &SyntheticSpec) -> ProblemInstance {
    let mid = libm::round(spec.grid / 2.0);
    let depot = Customer::new(0, (mid, mid), 0.0, (0.0, spec.horizon), 0.0);
    let mut customers = Vec::with_capacity(spec.n_customers + 1);
    customers.push(depot);
    for id in 1..=spec.n_customers {
        let x = libm::round(rng.random_range(0.0..=spec.grid));
        let y = libm::round(rng.random_range(0.0..=spec.grid));
        let d = libm::sqrt((x - mid) * (x - mid) + (y - mid) * (y - mid));
        let latest = spec.horizon - spec.service_time - d;
        debug_assert!(latest >= d, "horizon too short for the grid");
        let centre = rng.random_range(d..=latest);
        let width = rng.random_range(spec.min_window..=spec.max_window);
        let ready = (centre - width / 2.0).max(0.0);
        let due = (centre + width / 2.0).min(latest);
        let demand = f64::from(rng.random_range(1..=spec.max_demand));
        customers.push(Customer::new(
            id,
            (x, y),
            demand.min(spec.capacity),
            (ready, due),
            spec.service_time,
        ));
    }
    let n_dynamic = libm::round(spec.dynamicity * spec.n_customers as f64) as usize;
    for idx in sample(rng, spec.n_customers, n_dynamic.min(spec.n_customers)) {
        let c = &mut customers[idx + 1];
        let upper = c.ready_time.max(spec.horizon * 0.05);
        c.available_time = rng.random_range(spec.horizon * 0.01..=upper);
    }
    ProblemInstance::new("synthetic", spec.capacity, spec.n_customers.max(1), customers)
        .expect("generator produces valid instances")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate_schedule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn customers_fit_alone_and_dynamicity_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let spec = SyntheticSpec {
                n_customers: 20,
                dynamicity: 0.5,
                ..Default::default()
            };
            let inst = random_instance(&mut rng, &spec);
            for c in inst.customer_ids() {
                assert!(evaluate_schedule(&[c], &inst).is_feasible());
            }
            let profile = inst.dynamicity();
            assert_eq!(profile.dynamic_ids.len(), 10);
            assert!(profile.matches_declared(0.5, 20));
        }
    }
}
