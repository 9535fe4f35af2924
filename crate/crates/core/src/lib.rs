//! Ant Colony System solver for the Dynamic Vehicle Routing Problem with Time
//! Windows.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the problem
//! model, the construction heuristics (time-oriented nearest neighbour and I1
//! insertion), the single-colony ACS with joint (vehicle, customer)
//! transitions, relocate/exchange local search and a deterministic
//! virtual-time planner. File formats, wall-clock execution and the benchmark
//! harness live in the `dvrptw` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod acs;
pub mod construction;
mod error;
pub mod instance;
pub mod local_search;
pub mod model;
pub mod pheromone;
pub mod planner;
pub mod synthetic;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use error::Error;
pub use instance::{Customer, DynamicityProfile, ProblemInstance};
pub use model::{Solution, Tour};

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Node index of the depot in every instance.
pub const DEPOT: usize = 0;
