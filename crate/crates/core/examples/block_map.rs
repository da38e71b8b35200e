//! Walks the block map one level at a time for a few blocks, then checks it
//! is a bijection onto the gasket.
//!
//! ```text
//! cargo run --example block_map
//! ```

use sierpinski_blockmap::fractal::packing_dims;
use sierpinski_blockmap::lambda::{beta, lambda_map, partial_offset, verify_bijection, LevelIndex};
use sierpinski_blockmap::Coord2;

fn main() -> sierpinski_blockmap::Result<()> {
    let r_b = 3;
    let dims = packing_dims(r_b)?;
    println!("r_b = {r_b}: orthotope {} x {}", dims.width, dims.height);

    for omega in [
        Coord2::new(0, 0),
        Coord2::new(2, 0),
        Coord2::new(1, 4),
        Coord2::new(2, 8),
    ] {
        print!("omega {omega}:");
        for mu in 1..=r_b {
            let mu = LevelIndex::new(mu, r_b)?;
            let b = beta(omega, mu);
            let off = partial_offset(b, mu);
            print!(
                "  mu={} region={} +({},{})",
                mu.get(),
                b.get(),
                off.dx,
                off.dy
            );
        }
        let mapped = lambda_map(omega, r_b)?;
        println!("  => {} (depth {})", mapped.coord, mapped.depth);
    }

    println!();
    for r_b in 0..=10 {
        let rep = verify_bijection(r_b)?;
        println!(
            "r_b = {r_b:>2}: {:>6} blocks -> {:>6} cells, bijection: {}",
            packing_dims(r_b)?.area(),
            rep.image_size,
            rep.is_bijection()
        );
    }
    Ok(())
}
