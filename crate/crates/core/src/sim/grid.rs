use std::sync::atomic::AtomicU32;

use crate::error::{Error, Result};
use crate::fractal::{scale_level, Coord2};

/// Largest grid edge the simulator will allocate.
pub const MAX_GRID_EDGE: u64 = 1 << 16;

/// Dense `n x n` grid of `u32`, row-major, zero-initialised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    n: u64,
    cells: Vec<u32>,
}

impl Grid {
    pub fn new(n: u64) -> Result<Self> {
        scale_level(n)?;
        if n > MAX_GRID_EDGE {
            return Err(Error::Resource(format!(
                "grid edge {n} exceeds {MAX_GRID_EDGE}"
            )));
        }
        Ok(Grid {
            n,
            cells: vec![0; (n * n) as usize],
        })
    }

    /// Bytes a grid of edge `n` occupies.
    pub fn footprint(n: u64) -> u64 {
        n.saturating_mul(n).saturating_mul(4)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, c: Coord2) -> u32 {
        self.cells[(c.y * self.n + c.x) as usize]
    }

    pub fn set(&mut self, c: Coord2, v: u32) {
        self.cells[(c.y * self.n + c.x) as usize] = v;
    }

    pub fn clear(&mut self) {
        self.cells.fill(0);
    }

    pub fn count_nonzero(&self) -> u64 {
        self.cells.iter().filter(|&&v| v != 0).count() as u64
    }

    pub fn view(&self) -> GridView<'_> {
        GridView {
            n: self.n,
            cells: &self.cells,
        }
    }

    pub(crate) fn as_atomic(&mut self) -> &[AtomicU32] {
        let cells = self.cells.as_mut_slice();
        // SAFETY: AtomicU32 has the same size and alignment as u32, and the
        // exclusive borrow guarantees no non-atomic access while it lives.
        unsafe { std::slice::from_raw_parts(cells.as_mut_ptr() as *const AtomicU32, cells.len()) }
    }
}

/// Read-only view of the pre-launch grid handed to kernels.
///
/// Kernels that do not declare [`CellKernel::reads_input`](super::CellKernel::reads_input)
/// receive an empty view where every read is `None`.
#[derive(Debug, Clone, Copy)]
pub struct GridView<'a> {
    n: u64,
    cells: &'a [u32],
}

impl<'a> GridView<'a> {
    pub(crate) fn from_slice(n: u64, cells: &'a [u32]) -> Self {
        GridView { n, cells }
    }

    pub(crate) fn empty(n: u64) -> Self {
        GridView { n, cells: &[] }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Value at `(x, y)`; `None` outside the grid.
    #[inline]
    pub fn get(&self, x: i64, y: i64) -> Option<u32> {
        if x < 0 || y < 0 || x as u64 >= self.n || y as u64 >= self.n {
            return None;
        }
        self.cells
            .get((y as u64 * self.n + x as u64) as usize)
            .copied()
    }
}
