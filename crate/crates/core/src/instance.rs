//! Immutable problem description: customers, fleet capacity and the travel
//! metric, optionally rescaled so the scheduling horizon matches the length of
//! a working day.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result, DEPOT};

/// One node of the instance. Node 0 is the depot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Customer {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready_time: f64,
    pub due_date: f64,
    pub service_time: f64,
    /// Instant the request becomes known; 0 for a-priori customers.
    pub available_time: f64,
}

impl Customer {
    pub fn new(
        id: usize,
        (x, y): (f64, f64),
        demand: f64,
        (ready_time, due_date): (f64, f64),
        service_time: f64,
    ) -> Self {
        Self {
            id,
            x,
            y,
            demand,
            ready_time,
            due_date,
            service_time,
            available_time: 0.0,
        }
    }

    pub fn with_available_time(mut self, available_time: f64) -> Self {
        self.available_time = available_time;
        self
    }

    pub fn is_dynamic(&self) -> bool {
        self.available_time > 0.0
    }
}

/// Share of requests revealed during the day.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicityProfile {
    pub level: f64,
    pub dynamic_ids: Vec<usize>,
}

impl DynamicityProfile {
    /// True when the observed share of dynamic requests equals `declared`
    /// up to one customer of rounding.
    pub fn matches_declared(&self, declared: f64, n_customers: usize) -> bool {
        if n_customers == 0 {
            return self.dynamic_ids.is_empty();
        }
        let expected = declared * n_customers as f64;
        libm::fabs(expected - self.dynamic_ids.len() as f64) < 0.5 + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    name: String,
    customers: Vec<Customer>,
    capacity: f64,
    max_vehicles: usize,
    dist: Vec<f64>,
    scale: f64,
}

impl ProblemInstance {
    /// Validates the node list (depot first, ids equal to positions) and
    /// builds the Euclidean distance matrix at full precision.
    pub fn new(
        name: impl Into<String>,
        capacity: f64,
        max_vehicles: usize,
        customers: Vec<Customer>,
    ) -> Result<Self> {
        let depot = customers
            .first()
            .ok_or_else(|| Error::InvalidInstance("missing depot".into()))?;
        if depot.demand != 0.0 || depot.service_time != 0.0 || depot.available_time != 0.0 {
            return Err(Error::InvalidInstance(
                "depot must have zero demand, service time and available time".into(),
            ));
        }
        if !(capacity > 0.0) {
            return Err(Error::InvalidInstance("vehicle capacity must be positive".into()));
        }
        for (pos, c) in customers.iter().enumerate() {
            if c.id != pos {
                return Err(Error::InvalidInstance(format!(
                    "node at position {pos} has id {}",
                    c.id
                )));
            }
            if c.ready_time > c.due_date {
                return Err(Error::InvalidInstance(format!(
                    "node {pos}: ready time {} after due date {}",
                    c.ready_time, c.due_date
                )));
            }
            if c.demand < 0.0 || c.service_time < 0.0 || c.available_time < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "node {pos}: negative demand, service or available time"
                )));
            }
        }
        let dist = euclidean_matrix(&customers);
        Ok(Self {
            name: name.into(),
            customers,
            capacity,
            max_vehicles,
            dist,
            scale: 1.0,
        })
    }

    /// Multiplies every time quantity and the distance matrix by
    /// `s_v = t_wd / (l_0 - e_0)` so the horizon spans `t_wd` time units.
    pub fn scale_to_working_day(&self, t_wd: f64) -> Result<Self> {
        let depot = &self.customers[DEPOT];
        let horizon = depot.due_date - depot.ready_time;
        if !(horizon > 0.0) {
            return Err(Error::DegenerateHorizon {
                start: depot.ready_time,
                end: depot.due_date,
            });
        }
        if !(t_wd > 0.0) {
            return Err(Error::InvalidParameter("working day length must be positive"));
        }
        let s_v = t_wd / horizon;
        let customers = self
            .customers
            .iter()
            .map(|c| Customer {
                ready_time: c.ready_time * s_v,
                due_date: c.due_date * s_v,
                service_time: c.service_time * s_v,
                available_time: c.available_time * s_v,
                ..*c
            })
            .collect();
        let dist = self.dist.iter().map(|d| d * s_v).collect();
        Ok(Self {
            name: self.name.clone(),
            customers,
            capacity: self.capacity,
            max_vehicles: self.max_vehicles,
            dist,
            scale: self.scale * s_v,
        })
    }

    /// Replaces available times from `(id, available_time)` pairs expressed in
    /// the instance's current time units.
    pub fn with_available_times(&self, pairs: &[(usize, f64)]) -> Result<Self> {
        let mut customers = self.customers.clone();
        for &(id, t) in pairs {
            if id == DEPOT || id >= customers.len() {
                return Err(Error::InvalidInstance(format!(
                    "available time given for unknown customer {id}"
                )));
            }
            if !(t >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "customer {id}: negative available time"
                )));
            }
            customers[id].available_time = t;
        }
        Ok(Self {
            customers,
            ..self.clone()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn customer(&self, id: usize) -> &Customer {
        &self.customers[id]
    }

    pub fn depot(&self) -> &Customer {
        &self.customers[DEPOT]
    }

    /// Number of nodes including the depot.
    pub fn n_nodes(&self) -> usize {
        self.customers.len()
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len() - 1
    }

    pub fn customer_ids(&self) -> core::ops::Range<usize> {
        1..self.customers.len()
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Fleet size from the file header. Informational only.
    pub fn max_vehicles(&self) -> usize {
        self.max_vehicles
    }

    /// Cumulative time scale factor `s_v` (1 for an unscaled instance).
    pub fn scale_factor(&self) -> f64 {
        self.scale
    }

    /// Distance (= travel time) in the instance's current units.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.customers.len() + j]
    }

    pub fn unscaled_distance(&self, i: usize, j: usize) -> f64 {
        self.distance(i, j) / self.scale
    }

    /// Converts a length measured on this instance back to file units.
    pub fn unscale_length(&self, length: f64) -> f64 {
        length / self.scale
    }

    pub fn horizon(&self) -> (f64, f64) {
        let d = self.depot();
        (d.ready_time, d.due_date)
    }

    pub fn dynamicity(&self) -> DynamicityProfile {
        let dynamic_ids: Vec<usize> = self
            .customers
            .iter()
            .skip(1)
            .filter(|c| c.is_dynamic())
            .map(|c| c.id)
            .collect();
        let level = if self.n_customers() == 0 {
            0.0
        } else {
            dynamic_ids.len() as f64 / self.n_customers() as f64
        };
        DynamicityProfile { level, dynamic_ids }
    }
}

fn euclidean_matrix(customers: &[Customer]) -> Vec<f64> {
    let n = customers.len();
    let mut dist = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = customers[i].x - customers[j].x;
            let dy = customers[i].y - customers[j].y;
            let d = libm::sqrt(dx * dx + dy * dy);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    dist
}
