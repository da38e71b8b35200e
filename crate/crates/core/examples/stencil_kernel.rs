//! A custom nearest-neighbour kernel run through the block map.
//!
//! Each gasket cell counts how many of its eight neighbours were set before
//! the launch. Kernels only read the pre-launch snapshot, so the result does
//! not depend on the mapping or on block order.
//!
//! ```text
//! cargo run --example stencil_kernel
//! ```

use sierpinski_blockmap::sim::{launch, CellKernel, ConstantWrite, GridView};
use sierpinski_blockmap::{Coord2, FractalSpec, Grid, IntraStrategy, LaunchConfig};

/// Sets a cell to 1 + the number of set von Neumann neighbours.
struct Degree;

impl CellKernel for Degree {
    fn apply(&self, cell: Coord2, input: GridView<'_>) -> u32 {
        let (x, y) = (cell.x as i64, cell.y as i64);
        let set = [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]
            .into_iter()
            .filter(|&(nx, ny)| input.get(nx, ny).is_some_and(|v| v != 0))
            .count();
        1 + set as u32
    }

    fn reads_input(&self) -> bool {
        true
    }
}

fn main() -> sierpinski_blockmap::Result<()> {
    let spec = FractalSpec::new(16, 4)?;
    let mut grid = Grid::new(16)?;
    launch(
        &LaunchConfig::bounding_box(spec),
        &ConstantWrite(1),
        &mut grid,
    )?;

    let mut by_box = grid.clone();
    launch(&LaunchConfig::bounding_box(spec), &Degree, &mut by_box)?;
    let mut by_map = grid.clone();
    launch(
        &LaunchConfig::lambda(spec, IntraStrategy::BoundingSubBox),
        &Degree,
        &mut by_map,
    )?;
    assert_eq!(by_box, by_map);

    for y in 0..16 {
        let row: String = (0..16)
            .map(|x| match by_map.get(Coord2::new(x, y)) {
                0 => '.',
                v => char::from_digit(v, 10).unwrap_or('+'),
            })
            .collect();
        println!("{row}");
    }
    Ok(())
}
