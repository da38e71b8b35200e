//! The discrete Sierpinski gasket embedded in an `n x n` grid.
//!
//! Cells use a top-left origin with `y` growing downward. The apex sits at
//! `(0, 0)` and the full row is `y = n - 1`; a cell `(x, y)` belongs to the
//! gasket iff `x & (n - 1 - y) == 0`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported scale level. `3^40 < 2^64`, so every count stays exact.
pub const MAX_SCALE: u32 = 40;

/// Largest edge accepted by the brute-force enumerators (`2^13`).
pub const MAX_ORACLE_EDGE: u64 = 1 << 13;

/// `POW3[i] = 3^i` for `i <= MAX_SCALE`.
pub const POW3: [u64; MAX_SCALE as usize + 1] = {
    let mut table = [1u64; MAX_SCALE as usize + 1];
    let mut i = 1;
    while i <= MAX_SCALE as usize {
        table[i] = table[i - 1] * 3;
        i += 1;
    }
    table
};

/// An integer `(x, y)` pair: block coordinates, thread coordinates or cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coord2 {
    pub x: u64,
    pub y: u64,
}

impl Coord2 {
    pub const ORIGIN: Coord2 = Coord2 { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: u64, y: u64) -> Self {
        Coord2 { x, y }
    }
}

impl From<(u64, u64)> for Coord2 {
    fn from((x, y): (u64, u64)) -> Self {
        Coord2 { x, y }
    }
}

impl fmt::Display for Coord2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Block-grid dimensions of the packed parallel space for one scale level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthotopeDims {
    pub width: u64,
    pub height: u64,
}

impl OrthotopeDims {
    pub fn area(&self) -> u64 {
        self.width * self.height
    }

    #[inline]
    pub fn contains(&self, c: Coord2) -> bool {
        c.x < self.width && c.y < self.height
    }

    /// Row-major coordinate of a linear index.
    #[inline]
    pub fn coord_of(&self, linear: u64) -> Coord2 {
        Coord2::new(linear % self.width, linear / self.width)
    }

    /// All coordinates in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Coord2> + '_ {
        (0..self.area()).map(move |i| self.coord_of(i))
    }
}

/// A problem instance: gasket edge `n` and block edge `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FractalSpec {
    n: u64,
    rho: u64,
    r: u32,
    n_b: u64,
    r_b: u32,
}

impl FractalSpec {
    pub fn new(n: u64, rho: u64) -> Result<Self> {
        let r = scale_level(n)?;
        if r > MAX_SCALE {
            return Err(Error::out_of_range(
                "r",
                r as u64,
                format!("0..={MAX_SCALE}"),
            ));
        }
        let rho_level = scale_level(rho)?;
        if rho > n {
            return Err(Error::out_of_range("rho", rho, format!("1..={n}")));
        }
        Ok(FractalSpec {
            n,
            rho,
            r,
            n_b: n / rho,
            r_b: r - rho_level,
        })
    }

    /// Builds the instance for scale level `r` and block edge `rho`.
    pub fn from_levels(r: u32, rho: u64) -> Result<Self> {
        if r > MAX_SCALE {
            return Err(Error::out_of_range(
                "r",
                r as u64,
                format!("0..={MAX_SCALE}"),
            ));
        }
        Self::new(1 << r, rho)
    }

    /// Cell-grid edge length.
    pub fn n(&self) -> u64 {
        self.n
    }
    /// Block edge length in threads.
    pub fn rho(&self) -> u64 {
        self.rho
    }
    /// Cell scale level, `log2(n)`.
    pub fn r(&self) -> u32 {
        self.r
    }
    /// Block-grid edge, `n / rho`.
    pub fn n_b(&self) -> u64 {
        self.n_b
    }
    /// Block scale level, `log2(n_b)`.
    pub fn r_b(&self) -> u32 {
        self.r_b
    }
    /// Intra-block scale level, `log2(rho)`.
    pub fn r_local(&self) -> u32 {
        self.r - self.r_b
    }
}

fn check_scale(r: u32) -> Result<()> {
    if r > MAX_SCALE {
        Err(Error::out_of_range(
            "r",
            r as u64,
            format!("0..={MAX_SCALE}"),
        ))
    } else {
        Ok(())
    }
}

/// Number of gasket cells at scale level `r`, i.e. `3^r`.
pub fn volume(r: u32) -> Result<u64> {
    check_scale(r)?;
    Ok(POW3[r as usize])
}

/// `log2(n)` for a power of two.
pub fn scale_level(n: u64) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidSize(n));
    }
    Ok(n.trailing_zeros())
}

/// Packed block grid for scale level `r`: `3^floor(r/2)` wide, `3^ceil(r/2)` tall.
pub fn packing_dims(r: u32) -> Result<OrthotopeDims> {
    check_scale(r)?;
    Ok(OrthotopeDims {
        width: POW3[(r / 2) as usize],
        height: POW3[r.div_ceil(2) as usize],
    })
}

/// Unchecked bit test; callers guarantee `x, y < n` with `n` a power of two.
#[inline(always)]
pub fn member_bits(x: u64, y: u64, n: u64) -> bool {
    x & (n - 1 - y) == 0
}

pub fn is_member(t: Coord2, n: u64) -> Result<bool> {
    scale_level(n)?;
    if t.x >= n {
        return Err(Error::out_of_range("x", t.x, format!("0..{n}")));
    }
    if t.y >= n {
        return Err(Error::out_of_range("y", t.y, format!("0..{n}")));
    }
    Ok(member_bits(t.x, t.y, n))
}

/// Every gasket cell of edge `n`, row-major. Brute force; `n <= 2^13`.
pub fn enumerate_cells(n: u64) -> Result<Vec<Coord2>> {
    let r = scale_level(n)?;
    if n > MAX_ORACLE_EDGE {
        return Err(Error::Resource(format!(
            "enumerating edge {n} exceeds the oracle limit {MAX_ORACLE_EDGE}"
        )));
    }
    let mut cells = Vec::with_capacity(POW3[r as usize] as usize);
    for y in 0..n {
        for x in 0..n {
            if member_bits(x, y, n) {
                cells.push(Coord2::new(x, y));
            }
        }
    }
    Ok(cells)
}

/// `log2(3)`, the Hausdorff dimension of the gasket.
pub fn hausdorff_exponent() -> f64 {
    3f64.log2()
}
