//! Deterministic launch simulator.
//!
//! A launch walks the block grid of one mapping, places every thread on a
//! cell, runs a per-cell kernel on the cells inside the gasket and counts the
//! work it did. Blocks are spread over a rayon pool; the mapping partitions
//! the output so kernel writes never overlap.

mod cost;
mod coverage;
mod engine;
mod grid;
mod kernel;

pub use cost::{
    block_ratio, cost_ratio, expected_metrics, predicted_block_ratio, simulated_cost,
    strategy_correction,
};
pub use coverage::CoverageReport;
pub use engine::{launch, verify_coverage, Engine, LaunchConfig, Mapping, WorkMetrics};
pub use grid::{Grid, GridView, MAX_GRID_EDGE};
pub use kernel::{CellKernel, ConstantWrite, NeighborCount};
