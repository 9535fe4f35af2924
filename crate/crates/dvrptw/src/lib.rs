//! File formats, wall-clock planner, batch runner, statistics and reports
//! around the `dvrptw-core` solver.

pub mod format;
pub mod report;
pub mod run;
pub mod stats;
pub mod wall;

pub use dvrptw_core;
