//! Membership, volume and packing dimensions of the embedded gasket.
//!
//! ```text
//! cargo run --example gasket_basics -- 5
//! ```

use sierpinski_blockmap::fractal::{
    enumerate_cells, hausdorff_exponent, is_member, packing_dims, volume,
};
use sierpinski_blockmap::Coord2;

fn main() -> sierpinski_blockmap::Result<()> {
    let r: u32 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);
    let n = 1u64 << r;

    for y in 0..n.min(32) {
        let row: String = (0..n.min(32))
            .map(|x| {
                if is_member(Coord2::new(x, y), n).unwrap() {
                    '#'
                } else {
                    '.'
                }
            })
            .collect();
        println!("{row}");
    }

    let dims = packing_dims(r)?;
    println!();
    println!("n = {n}, r = {r}");
    println!(
        "cells: {} (enumerated {})",
        volume(r)?,
        enumerate_cells(n)?.len()
    );
    println!("packs into {} x {} blocks", dims.width, dims.height);
    println!(
        "n^H = {:.3} with H = {:.6}",
        (n as f64).powf(hausdorff_exponent()),
        hausdorff_exponent()
    );
    Ok(())
}
