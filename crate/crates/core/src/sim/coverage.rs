use crate::fractal::{member_bits, Coord2};

/// Per-cell write counts from a traced launch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub n: u64,
    /// Row-major write counter per cell.
    pub counts: Vec<u32>,
    /// Cells written more than once.
    pub duplicates: Vec<Coord2>,
    /// Gasket cells never written.
    pub misses: Vec<Coord2>,
    /// Writes that landed off the gasket, including outside the grid.
    pub strays: Vec<Coord2>,
}

impl CoverageReport {
    pub(crate) fn from_counts(n: u64, counts: Vec<u32>, outside: Vec<Coord2>) -> Self {
        let mut duplicates = Vec::new();
        let mut misses = Vec::new();
        let mut strays = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            let cell = Coord2::new(i as u64 % n, i as u64 / n);
            let member = member_bits(cell.x, cell.y, n);
            if c > 1 {
                duplicates.push(cell);
            }
            if member && c == 0 {
                misses.push(cell);
            }
            if !member && c > 0 {
                strays.push(cell);
            }
        }
        strays.extend(outside);
        CoverageReport {
            n,
            counts,
            duplicates,
            misses,
            strays,
        }
    }

    /// Every gasket cell written once and nothing else written.
    pub fn is_exact(&self) -> bool {
        self.duplicates.is_empty() && self.misses.is_empty() && self.strays.is_empty()
    }

    pub fn count(&self, c: Coord2) -> u32 {
        self.counts[(c.y * self.n + c.x) as usize]
    }
}
