//! Placement of a mapped block's threads onto the gasket cells of its tile.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fractal::{enumerate_cells, member_bits, packing_dims, scale_level, Coord2};
use crate::lambda::{map_unchecked, Mutation};

/// Largest block edge accepted for a lookup table.
pub const MAX_TABLE_EDGE: u64 = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntraStrategy {
    /// Each of the block's `3^r'` threads runs the block map again at level `r' = log2(rho)`.
    FurtherUnrolling,
    /// Thread `i` reads its offset from a table of the tile's cells.
    SharedLookupTable,
    /// All `rho^2` threads run; those outside the tile's gasket are discarded.
    BoundingSubBox,
}

impl IntraStrategy {
    pub const ALL: [IntraStrategy; 3] = [
        IntraStrategy::FurtherUnrolling,
        IntraStrategy::SharedLookupTable,
        IntraStrategy::BoundingSubBox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntraStrategy::FurtherUnrolling => "unroll",
            IntraStrategy::SharedLookupTable => "table",
            IntraStrategy::BoundingSubBox => "subbox",
        }
    }
}

impl fmt::Display for IntraStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntraStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntraStrategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}` (unroll, table, subbox)")))
    }
}

/// Block-local gasket offsets in row-major order; thread `i` takes `entries[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupTable {
    entries: Vec<Coord2>,
    rho: u64,
}

impl LookupTable {
    pub fn entries(&self) -> &[Coord2] {
        &self.entries
    }

    pub fn rho(&self) -> u64 {
        self.rho
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Offset for linear thread id `i`; `None` for idle threads.
    #[inline]
    pub fn get(&self, i: usize) -> Option<Coord2> {
        self.entries.get(i).copied()
    }
}

/// Re-applies the block map to thread `t`, laid out on the `log2(rho)` orthotope.
pub fn unroll_thread_map(t: Coord2, rho: u64) -> Result<Coord2> {
    let r_local = scale_level(rho)?;
    let dims = packing_dims(r_local)?;
    if !dims.contains(t) {
        return Err(Error::out_of_range(
            "t",
            if t.x >= dims.width { t.x } else { t.y },
            format!("inside {}x{}", dims.width, dims.height),
        ));
    }
    Ok(map_unchecked(t, r_local, Mutation::None))
}

pub fn build_lookup_table(rho: u64) -> Result<LookupTable> {
    scale_level(rho)?;
    if rho > MAX_TABLE_EDGE {
        return Err(Error::out_of_range(
            "rho",
            rho,
            format!("1..={MAX_TABLE_EDGE}"),
        ));
    }
    Ok(LookupTable {
        entries: enumerate_cells(rho)?,
        rho,
    })
}

/// Identity map with the block-local membership test; `None` means discard.
#[inline]
pub fn subbox_thread_map(t: Coord2, rho: u64) -> Option<Coord2> {
    (t.x < rho && t.y < rho && member_bits(t.x, t.y, rho)).then_some(t)
}

/// All block-local cells a strategy produces, in thread order.
pub fn strategy_cells(strategy: IntraStrategy, rho: u64) -> Result<Vec<Coord2>> {
    let r_local = scale_level(rho)?;
    match strategy {
        IntraStrategy::FurtherUnrolling => packing_dims(r_local)?
            .iter()
            .map(|t| unroll_thread_map(t, rho))
            .collect(),
        IntraStrategy::SharedLookupTable => Ok(build_lookup_table(rho)?.entries),
        IntraStrategy::BoundingSubBox => Ok((0..rho * rho)
            .filter_map(|i| subbox_thread_map(Coord2::new(i % rho, i / rho), rho))
            .collect()),
    }
}
