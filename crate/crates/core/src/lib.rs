//! Block-space mapping of a packed grid of thread blocks onto the discrete
//! Sierpinski gasket embedded in an `n x n` grid.
//!
//! A bounding-box launch covers all `n^2` cells and discards the threads that
//! fall outside the gasket. The block map in [`lambda`] instead launches a
//! `3^floor(r_b/2) x 3^ceil(r_b/2)` grid of blocks and places each one on a
//! distinct gasket tile, so only `O(n^log2(3))` threads are needed.
//!
//! - [`fractal`]: membership, volume, packing dimensions, enumeration.
//! - [`lambda`]: the block map and its bijection check.
//! - [`intra`]: the three ways to place threads inside a mapped block.
//! - [`sim`]: the launch simulator, work counters and cost model.
//! - [`bench`]: parameter sweeps and the CSV record format.
//! - [`render`]: PBM/PGM rasters of the gasket, coverage and block placement.
//! - [`commands`]: the `verify`, `bench`, `render` and `info` front ends.

pub mod bench;
pub mod commands;
pub mod error;
pub mod fractal;
pub mod intra;
pub mod lambda;
pub mod render;
pub mod sim;

pub use error::{Error, Result};
pub use fractal::{Coord2, FractalSpec, OrthotopeDims};
pub use intra::IntraStrategy;
pub use sim::{Grid, LaunchConfig, Mapping, WorkMetrics};
