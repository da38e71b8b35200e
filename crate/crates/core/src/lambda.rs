//! Block-space map from the packed orthotope onto the gasket.
//!
//! A block `omega` is decoded one scale level `mu = 1..=r_b` at a time. Each
//! level reads one base-3 digit of `omega` (odd levels from `omega.y`, even
//! levels from `omega.x`), which selects one of the three sub-copies of the
//! gasket at that level:
//!
//! | region | copy         | offset at level `mu`          |
//! |--------|--------------|-------------------------------|
//! | 0      | top          | `(0, 0)`                      |
//! | 1      | bottom-left  | `(0, 2^(mu-1))`               |
//! | 2      | bottom-right | `(2^(mu-1), 2^(mu-1))`        |
//!
//! Summing the per-level offsets gives the mapped cell. On a device the sum
//! would be a tree reduction across the block's threads; here it is a loop
//! and the reduction depth is reported alongside the result.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fractal::{enumerate_cells, packing_dims, Coord2, MAX_SCALE, POW3};

/// Scale-level index `mu`, valid in `1..=r_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LevelIndex(u32);

impl LevelIndex {
    pub fn new(mu: u32, r_b: u32) -> Result<Self> {
        if mu == 0 || mu > r_b || mu > MAX_SCALE {
            return Err(Error::out_of_range("mu", mu as u64, format!("1..={r_b}")));
        }
        Ok(LevelIndex(mu))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Which of the three sub-copies a block falls in at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionIndex(u8);

impl RegionIndex {
    pub const TOP: RegionIndex = RegionIndex(0);
    pub const BOTTOM_LEFT: RegionIndex = RegionIndex(1);
    pub const BOTTOM_RIGHT: RegionIndex = RegionIndex(2);

    pub fn new(beta: u8) -> Result<Self> {
        if beta > 2 {
            return Err(Error::out_of_range("beta", beta as u64, "0..=2"));
        }
        Ok(RegionIndex(beta))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

/// Offset contributed by one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartialOffset {
    pub dx: u64,
    pub dy: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapResult {
    pub coord: Coord2,
    /// Tree-reduction steps a cooperating block would need to sum the offsets.
    pub depth: u32,
}

/// Deliberate corruptions of the map's terms.
///
/// Used only to show that the bijection checks reject a wrong formula.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// The `x` selector uses `mu mod 2` instead of `(mu + 1) mod 2`.
    XParity,
    /// The `y` selector uses `(mu + 1) mod 2` instead of `mu mod 2`.
    YParity,
    /// Digit divisor `3^ceil(mu/2)` instead of `3^(ceil(mu/2) - 1)`.
    Divisor,
    /// Level offset `2^mu` instead of `2^(mu - 1)`.
    Offset,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::XParity,
        Mutation::YParity,
        Mutation::Divisor,
        Mutation::Offset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::XParity => "x-parity",
            Mutation::YParity => "y-parity",
            Mutation::Divisor => "divisor",
            Mutation::Offset => "offset",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        std::iter::once(Mutation::None)
            .chain(Mutation::ALL)
            .find(|m| m.name() == s)
    }
}

#[inline(always)]
fn beta_raw(omega: Coord2, mu: u32, mutation: Mutation) -> u8 {
    let (x_sel, y_sel) = match mutation {
        Mutation::XParity => ((mu % 2) as u64, (mu % 2) as u64),
        Mutation::YParity => (((mu + 1) % 2) as u64, ((mu + 1) % 2) as u64),
        _ => (((mu + 1) % 2) as u64, (mu % 2) as u64),
    };
    let exp = match mutation {
        Mutation::Divisor => mu.div_ceil(2),
        _ => mu.div_ceil(2) - 1,
    };
    let num = omega.x * x_sel + omega.y * y_sel;
    ((num / POW3[exp as usize]) % 3) as u8
}

#[inline(always)]
fn offset_raw(b: u8, mu: u32, mutation: Mutation) -> PartialOffset {
    let step = match mutation {
        Mutation::Offset => 1u64 << mu,
        _ => 1u64 << (mu - 1),
    };
    let wx = (b / 2) as u64;
    let wy = b as u64 - wx;
    PartialOffset {
        dx: wx * step,
        dy: wy * step,
    }
}

/// Region of `omega` at level `mu`: a base-3 digit of `omega.y` (odd `mu`)
/// or `omega.x` (even `mu`).
pub fn beta(omega: Coord2, mu: LevelIndex) -> RegionIndex {
    RegionIndex(beta_raw(omega, mu.get(), Mutation::None))
}

/// `(floor(b/2), b - floor(b/2)) * 2^(mu-1)`.
pub fn partial_offset(b: RegionIndex, mu: LevelIndex) -> PartialOffset {
    offset_raw(b.get(), mu.get(), Mutation::None)
}

/// `ceil(log2(max(r_b, 1)))`.
pub fn reduction_depth(r_b: u32) -> u32 {
    r_b.max(1).next_power_of_two().trailing_zeros()
}

/// Maps block `omega` of the packed orthotope at level `r_b` onto a gasket cell
/// of edge `2^r_b`.
pub fn lambda_map(omega: Coord2, r_b: u32) -> Result<MapResult> {
    lambda_map_with(omega, r_b, Mutation::None)
}

#[doc(hidden)]
pub fn lambda_map_with(omega: Coord2, r_b: u32, mutation: Mutation) -> Result<MapResult> {
    let dims = packing_dims(r_b)?;
    if !dims.contains(omega) {
        return Err(Error::out_of_range(
            "omega",
            if omega.x >= dims.width {
                omega.x
            } else {
                omega.y
            },
            format!("inside {}x{}", dims.width, dims.height),
        ));
    }
    Ok(MapResult {
        coord: map_unchecked(omega, r_b, mutation),
        depth: reduction_depth(r_b),
    })
}

/// Loop body shared by the launch engine; `omega` must lie in the orthotope.
#[inline]
pub(crate) fn map_unchecked(omega: Coord2, r_b: u32, mutation: Mutation) -> Coord2 {
    let mut acc = Coord2::ORIGIN;
    for mu in 1..=r_b {
        let off = offset_raw(beta_raw(omega, mu, mutation), mu, mutation);
        acc.x += off.dx;
        acc.y += off.dy;
    }
    acc
}

/// `ceil(log2(n) / log2(log2(n)))`: block size sufficient for the offset
/// reduction to be work-efficient. Advisory only.
pub fn suggested_block_threads(n: u64) -> Result<u64> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::out_of_range("n", n, "a power of two >= 4"));
    }
    let r = n.trailing_zeros() as f64;
    Ok(((r / r.log2()).ceil() as u64).max(1))
}

/// Outcome of checking the map over a whole orthotope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionReport {
    pub r_b: u32,
    /// Number of blocks mapped.
    pub image_size: u64,
    pub duplicates: u64,
    pub misses: u64,
    /// First block (row-major) whose image is a duplicate or not a gasket cell.
    pub witness: Option<Coord2>,
}

impl BijectionReport {
    pub fn is_bijection(&self) -> bool {
        self.witness.is_none() && self.duplicates == 0 && self.misses == 0
    }
}

/// Checks that the image of the orthotope equals the enumerated gasket with
/// no repeats. `r_b <= 12`.
pub fn verify_bijection(r_b: u32) -> Result<BijectionReport> {
    verify_bijection_with(r_b, Mutation::None)
}

#[doc(hidden)]
pub fn verify_bijection_with(r_b: u32, mutation: Mutation) -> Result<BijectionReport> {
    if r_b > 12 {
        return Err(Error::out_of_range("r_b", r_b as u64, "0..=12"));
    }
    let n = 1u64 << r_b;
    let mut expected: HashSet<Coord2> = enumerate_cells(n)?.into_iter().collect();
    let dims = packing_dims(r_b)?;
    let mut duplicates = 0;
    let mut witness = None;
    let mut hit = HashSet::with_capacity(expected.len());
    for omega in dims.iter() {
        let cell = map_unchecked(omega, r_b, mutation);
        let fresh = hit.insert(cell);
        let member = expected.remove(&cell);
        if !fresh {
            duplicates += 1;
        }
        if !member && witness.is_none() {
            witness = Some(omega);
        }
    }
    Ok(BijectionReport {
        r_b,
        image_size: hit.len() as u64,
        duplicates,
        misses: expected.len() as u64,
        witness,
    })
}
