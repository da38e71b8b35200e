use super::grid::GridView;
use crate::fractal::Coord2;

/// Per-cell operation run by every useful thread.
///
/// The return value is stored at `cell`. Kernels may read any cell of the
/// pre-launch snapshot, but only if [`reads_input`](Self::reads_input) is
/// true; otherwise the view is empty.
pub trait CellKernel: Sync {
    fn apply(&self, cell: Coord2, input: GridView<'_>) -> u32;

    fn reads_input(&self) -> bool {
        false
    }
}

/// Writes the same value everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantWrite(pub u32);

impl CellKernel for ConstantWrite {
    #[inline(always)]
    fn apply(&self, _cell: Coord2, _input: GridView<'_>) -> u32 {
        self.0
    }
}

/// Nearest-neighbour stencil: number of non-zero 8-neighbours in the snapshot.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeighborCount;

impl CellKernel for NeighborCount {
    fn apply(&self, cell: Coord2, input: GridView<'_>) -> u32 {
        let (x, y) = (cell.x as i64, cell.y as i64);
        let mut count = 0;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if (dx, dy) != (0, 0) && input.get(x + dx, y + dy).is_some_and(|v| v != 0) {
                    count += 1;
                }
            }
        }
        count
    }

    fn reads_input(&self) -> bool {
        true
    }
}
