//! Closed-form work model.
//!
//! Every counted operation costs one unit: a block-map term, a membership
//! test, a table read, or a kernel write.
//!
//! ```text
//! bounding box : n_b^2 * rho^2 membership tests        + 3^r writes
//! lambda       : 3^r_b * (r_b + T * c)                 + 3^r writes
//! ```
//!
//! with `T` threads per block and `c` ops per thread: `3^r'` and `r'` for
//! further unrolling, `3^r'` and `1` for the lookup table, `rho^2` and `1` for
//! the bounding sub-box (`r' = log2(rho)`). At `rho = 1` a block is a single
//! thread on a single cell and the intra-block stage costs nothing.

use super::engine::{Mapping, WorkMetrics};
use crate::error::{Error, Result};
use crate::fractal::{hausdorff_exponent, FractalSpec, POW3};
use crate::intra::IntraStrategy;
use crate::lambda::reduction_depth;

fn overflow() -> Error {
    Error::Resource("work count exceeds 64 bits".into())
}

/// Threads per block and map ops per thread for a lambda launch.
fn per_block(spec: &FractalSpec, strategy: IntraStrategy) -> (u64, u64) {
    let rl = spec.r_local();
    if spec.rho() == 1 {
        return (1, 0);
    }
    match strategy {
        IntraStrategy::FurtherUnrolling => (POW3[rl as usize], rl as u64),
        IntraStrategy::SharedLookupTable => (POW3[rl as usize], 1),
        IntraStrategy::BoundingSubBox => (spec.rho() * spec.rho(), 1),
    }
}

/// Counters a launch of this shape must report (wall time zero).
pub fn expected_metrics(
    spec: &FractalSpec,
    mapping: Mapping,
    strategy: Option<IntraStrategy>,
) -> Result<WorkMetrics> {
    let useful = POW3[spec.r() as usize];
    let (blocks, threads, map_ops, depth) = match mapping {
        Mapping::BoundingBox => {
            let threads = spec.n().checked_mul(spec.n()).ok_or_else(overflow)?;
            (spec.n_b() * spec.n_b(), threads, threads, 0)
        }
        Mapping::Lambda => {
            let strategy = strategy.ok_or_else(|| {
                Error::Config("lambda mapping needs an intra-block strategy".into())
            })?;
            let blocks = POW3[spec.r_b() as usize];
            let (per, ops) = per_block(spec, strategy);
            let block_ops = (spec.r_b() as u64)
                .checked_add(per.checked_mul(ops).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            (
                blocks,
                blocks.checked_mul(per).ok_or_else(overflow)?,
                blocks.checked_mul(block_ops).ok_or_else(overflow)?,
                reduction_depth(spec.r_b()),
            )
        }
    };
    Ok(WorkMetrics {
        blocks_launched: blocks,
        threads_launched: threads,
        threads_useful: useful,
        map_ops,
        reduction_depth: depth,
        simulated_cost: map_ops.checked_add(useful).ok_or_else(overflow)?,
        wall_ns: 0.0,
    })
}

pub fn simulated_cost(
    spec: &FractalSpec,
    mapping: Mapping,
    strategy: Option<IntraStrategy>,
) -> Result<u64> {
    expected_metrics(spec, mapping, strategy).map(|m| m.simulated_cost)
}

/// `simulated_cost(bb) / simulated_cost(lambda)`.
pub fn cost_ratio(spec: &FractalSpec, strategy: IntraStrategy) -> Result<f64> {
    let bb = simulated_cost(spec, Mapping::BoundingBox, None)?;
    let lambda = simulated_cost(spec, Mapping::Lambda, Some(strategy))?;
    Ok(bb as f64 / lambda as f64)
}

/// Blocks launched by the bounding box per block launched by lambda: `n_b^2 / 3^r_b`.
pub fn block_ratio(spec: &FractalSpec) -> f64 {
    (spec.n_b() * spec.n_b()) as f64 / POW3[spec.r_b() as usize] as f64
}

/// Factor by which [`cost_ratio`] departs from `n_b^(2 - H)`:
/// `(rho^2 + 3^r' (3/4)^r_b) / (r_b + T c + 3^r')`.
pub fn strategy_correction(spec: &FractalSpec, strategy: IntraStrategy) -> f64 {
    let (per, ops) = per_block(spec, strategy);
    let rho = spec.rho() as f64;
    let local = 3f64.powi(spec.r_local() as i32);
    let bb_per_block = rho * rho + local * 0.75f64.powi(spec.r_b() as i32);
    let lambda_per_block = spec.r_b() as f64 + (per * ops) as f64 + local;
    bb_per_block / lambda_per_block
}

/// Asymptotic block-count ratio `n_b^(2 - H)`.
pub fn predicted_block_ratio(n_b: u64) -> f64 {
    (n_b as f64).powf(2.0 - hausdorff_exponent())
}
