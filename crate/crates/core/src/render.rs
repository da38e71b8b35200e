//! Plain-text PBM (P1) and PGM (P2) rasters.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fractal::{member_bits, packing_dims, scale_level, FractalSpec, MAX_ORACLE_EDGE};
use crate::intra::IntraStrategy;
use crate::lambda::lambda_map;
use crate::sim::{verify_coverage, Grid, LaunchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    /// Member cells white.
    Gasket,
    /// Per-cell write counts of a traced lambda launch.
    Coverage,
    /// Gasket cells shaded by the linear index of the block that covers them.
    Blockmap,
}

impl FromStr for RenderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gasket" => Ok(RenderMode::Gasket),
            "coverage" => Ok(RenderMode::Coverage),
            "blockmap" => Ok(RenderMode::Blockmap),
            _ => Err(Error::Config(format!(
                "unknown render mode `{s}` (gasket, coverage, blockmap)"
            ))),
        }
    }
}

/// Square raster. Bitmaps hold 1 for white and 0 for black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub n: u64,
    pub bitmap: bool,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

impl Raster {
    pub fn get(&self, x: u64, y: u64) -> u16 {
        self.pixels[(y * self.n + x) as usize]
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        // PBM uses 1 for black, so white pixels are written as 0.
        let bitmap = self.bitmap;
        if bitmap {
            writeln!(w, "P1\n{} {}", self.n, self.n)?;
        } else {
            writeln!(w, "P2\n{} {}\n{}", self.n, self.n, self.maxval)?;
        }
        // keep lines under 70 characters
        let per_line = if bitmap { 32 } else { 16 };
        for row in self.pixels.chunks(self.n as usize) {
            for line in row.chunks(per_line) {
                let mut first = true;
                for &p in line {
                    if !first {
                        w.write_all(b" ")?;
                    }
                    first = false;
                    if bitmap {
                        w.write_all(if p == 1 { b"0" } else { b"1" })?;
                    } else {
                        write!(w, "{p}")?;
                    }
                }
                w.write_all(b"\n")?;
            }
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    /// Parses a P1 or P2 file as written by [`Raster::write_to`].
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("malformed netpbm: {m}"));
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let magic = tokens.next().ok_or_else(|| bad("empty"))?;
        let mut num = |what: &str| -> Result<u64> {
            tokens
                .next()
                .ok_or_else(|| bad(what))?
                .parse()
                .map_err(|_| bad(what))
        };
        let (w, h) = (num("width")?, num("height")?);
        if w != h {
            return Err(bad("raster is not square"));
        }
        let maxval = match magic {
            "P1" => 1,
            "P2" => num("maxval")? as u16,
            _ => return Err(bad("unsupported magic")),
        };
        let mut pixels = Vec::with_capacity((w * h) as usize);
        for _ in 0..w * h {
            let v = num("pixel")? as u16;
            pixels.push(if magic == "P1" { 1 - v.min(1) } else { v });
        }
        Ok(Raster {
            n: w,
            bitmap: magic == "P1",
            maxval,
            pixels,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn check_edge(n: u64) -> Result<()> {
    scale_level(n)?;
    if n > MAX_ORACLE_EDGE {
        return Err(Error::out_of_range(
            "n",
            n,
            format!("1..={MAX_ORACLE_EDGE}"),
        ));
    }
    Ok(())
}

pub fn gasket(n: u64) -> Result<Raster> {
    check_edge(n)?;
    let pixels = (0..n * n)
        .map(|i| member_bits(i % n, i / n, n) as u16)
        .collect();
    Ok(Raster {
        n,
        bitmap: true,
        maxval: 1,
        pixels,
    })
}

/// Write counts after a traced lambda launch with the given strategy.
pub fn coverage(n: u64, rho: u64, strategy: IntraStrategy) -> Result<Raster> {
    check_edge(n)?;
    let spec = FractalSpec::new(n, rho)?;
    let mut grid = Grid::new(n)?;
    let report = verify_coverage(&LaunchConfig::lambda(spec, strategy), &mut grid)?;
    let pixels: Vec<u16> = report
        .counts
        .iter()
        .map(|&c| c.min(u16::MAX as u32) as u16)
        .collect();
    let maxval = pixels.iter().copied().max().unwrap_or(1).max(1);
    Ok(Raster {
        n,
        bitmap: false,
        maxval,
        pixels,
    })
}

/// Each gasket cell gets `1 + (omega_linear mod 255)` of the block placed on
/// it; everything else stays 0.
pub fn blockmap(n: u64, rho: u64) -> Result<Raster> {
    check_edge(n)?;
    let spec = FractalSpec::new(n, rho)?;
    let dims = packing_dims(spec.r_b())?;
    let mut pixels = vec![0u16; (n * n) as usize];
    for (linear, omega) in dims.iter().enumerate() {
        let shade = 1 + (linear % 255) as u16;
        let tile = lambda_map(omega, spec.r_b())?.coord;
        for ty in 0..rho {
            for tx in 0..rho {
                if member_bits(tx, ty, rho) {
                    let (x, y) = (tile.x * rho + tx, tile.y * rho + ty);
                    pixels[(y * n + x) as usize] = shade;
                }
            }
        }
    }
    Ok(Raster {
        n,
        bitmap: false,
        maxval: 255,
        pixels,
    })
}
