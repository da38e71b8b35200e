//! A small timing sweep written to CSV, then read back.
//!
//! ```text
//! cargo run --release --example bench_sweep -- sweep.csv
//! ```

use std::path::PathBuf;

use sierpinski_blockmap::bench::{read_csv, run_sweep, write_csv, RepScheme, SweepConfig};
use sierpinski_blockmap::sim::Engine;

fn main() -> sierpinski_blockmap::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sweep.csv"));
    let config = SweepConfig {
        r_min: 6,
        r_max: 11,
        rho_set: vec![4, 16],
        reps: RepScheme {
            sub_averages: 10,
            runs_per_sub: 3,
        },
        out: out.clone(),
        ..SweepConfig::default()
    };
    let engine = Engine::new(config.workers)?;
    let rows = run_sweep(&config, &engine)?;
    write_csv(&out, &rows)?;

    for row in read_csv(&out)? {
        let Some(m) = row.metrics else { continue };
        println!(
            "r={:<2} rho={:<2} {:<6} {:<6} cost={:<10} wall={:>10.0}ns cost_ratio={:<8} speedup={}",
            row.r,
            row.rho,
            row.mapping,
            row.strategy.map_or("none", |s| s.name()),
            m.simulated_cost,
            m.wall_ns,
            row.cost_ratio.map_or("-".into(), |c| format!("{c:.3}")),
            row.speedup.map_or("-".into(), |s| format!("{s:.3}")),
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
