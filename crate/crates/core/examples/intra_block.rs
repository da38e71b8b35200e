//! The three intra-block strategies on one block edge, side by side.
//!
//! ```text
//! cargo run --example intra_block -- 8
//! ```

use sierpinski_blockmap::fractal::packing_dims;
use sierpinski_blockmap::intra::{
    build_lookup_table, strategy_cells, subbox_thread_map, unroll_thread_map,
};
use sierpinski_blockmap::{Coord2, IntraStrategy};

fn main() -> sierpinski_blockmap::Result<()> {
    let rho: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);
    let r_local = rho.trailing_zeros();

    let dims = packing_dims(r_local)?;
    println!(
        "further unrolling: {} threads on a {} x {} orthotope",
        dims.area(),
        dims.width,
        dims.height
    );
    for t in dims.iter().take(9) {
        println!("  thread {t} -> {}", unroll_thread_map(t, rho)?);
    }

    let table = build_lookup_table(rho)?;
    println!("lookup table: {} entries", table.len());
    for (i, c) in table.entries().iter().take(9).enumerate() {
        println!("  thread {i} -> {c}");
    }

    let kept = (0..rho * rho)
        .filter(|i| subbox_thread_map(Coord2::new(i % rho, i / rho), rho).is_some())
        .count();
    println!("bounding sub-box: {} threads, {kept} kept", rho * rho);

    for s in IntraStrategy::ALL {
        let mut cells = strategy_cells(s, rho)?;
        cells.sort();
        println!(
            "{s:>7}: {} cells, first {:?}",
            cells.len(),
            &cells[..cells.len().min(3)]
        );
    }
    Ok(())
}
