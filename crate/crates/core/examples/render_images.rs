//! Writes the gasket, a coverage map and the block placement as PBM/PGM files.
//!
//! ```text
//! cargo run --example render_images -- out-dir
//! ```

use std::path::PathBuf;

use sierpinski_blockmap::render;
use sierpinski_blockmap::IntraStrategy;

fn main() -> sierpinski_blockmap::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir).map_err(|e| sierpinski_blockmap::Error::Io {
        path: dir.clone(),
        source: e,
    })?;

    let n = 256;
    let outputs = [
        ("gasket.pbm", render::gasket(n)?),
        (
            "coverage.pgm",
            render::coverage(n, 8, IntraStrategy::SharedLookupTable)?,
        ),
        ("blockmap.pgm", render::blockmap(n, 16)?),
    ];
    for (name, raster) in outputs {
        let path = dir.join(name);
        raster.save(&path)?;
        let lit = raster.pixels.iter().filter(|&&p| p > 0).count();
        println!("{}: {n}x{n}, {lit} non-zero pixels", path.display());
    }
    Ok(())
}
