//! Launches the constant-write kernel under the bounding box and under each
//! lambda strategy and prints the work counters.
//!
//! ```text
//! cargo run --release --example launch_compare -- 10 8
//! ```

use sierpinski_blockmap::sim::{launch, ConstantWrite};
use sierpinski_blockmap::{FractalSpec, Grid, IntraStrategy, LaunchConfig};

fn main() -> sierpinski_blockmap::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let r = args.next().flatten().unwrap_or(10) as u32;
    let rho = args.next().flatten().unwrap_or(8);
    let spec = FractalSpec::from_levels(r, rho)?;

    let configs = std::iter::once(LaunchConfig::bounding_box(spec))
        .chain(IntraStrategy::ALL.map(|s| LaunchConfig::lambda(spec, s).with_coverage()));

    println!(
        "{:<14} {:>9} {:>11} {:>9} {:>11} {:>5} {:>11} {:>10}",
        "launch", "blocks", "threads", "useful", "map ops", "depth", "cost", "wall ms"
    );
    let mut reference: Option<Grid> = None;
    for cfg in configs {
        let mut grid = Grid::new(spec.n())?;
        let m = launch(&cfg, &ConstantWrite(1), &mut grid)?;
        let label = match cfg.strategy {
            Some(s) => format!("lambda/{s}"),
            None => "bounding box".into(),
        };
        println!(
            "{label:<14} {:>9} {:>11} {:>9} {:>11} {:>5} {:>11} {:>10.3}",
            m.blocks_launched,
            m.threads_launched,
            m.threads_useful,
            m.map_ops,
            m.reduction_depth,
            m.simulated_cost,
            m.wall_ns / 1e6
        );
        match &reference {
            Some(g) => assert_eq!(g, &grid, "grids differ"),
            None => reference = Some(grid),
        }
    }
    println!("all grids identical");
    Ok(())
}
