//! Analytic work ratio of the bounding box over the block map as `n` grows.
//!
//! ```text
//! cargo run --example cost_model -- 16
//! ```

use sierpinski_blockmap::sim::{block_ratio, cost_ratio, predicted_block_ratio};
use sierpinski_blockmap::{FractalSpec, IntraStrategy};

fn main() -> sierpinski_blockmap::Result<()> {
    let rho: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(16);
    println!("rho = {rho}");
    println!(
        "{:>3} {:>12} {:>12} {:>9} {:>9} {:>9}",
        "r", "blocks", "n_b^(2-H)", "unroll", "table", "subbox"
    );
    for r in rho.trailing_zeros()..=24 {
        let spec = FractalSpec::from_levels(r, rho)?;
        let ratios: Vec<f64> = IntraStrategy::ALL
            .iter()
            .map(|&s| cost_ratio(&spec, s))
            .collect::<Result<_, _>>()?;
        println!(
            "{r:>3} {:>12.4} {:>12.4} {:>9.3} {:>9.3} {:>9.3}",
            block_ratio(&spec),
            predicted_block_ratio(spec.n_b()),
            ratios[0],
            ratios[1],
            ratios[2]
        );
    }
    Ok(())
}
