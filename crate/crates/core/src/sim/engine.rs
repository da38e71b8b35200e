use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::coverage::CoverageReport;
use super::grid::{Grid, GridView};
use super::kernel::{CellKernel, ConstantWrite};
use crate::error::{Error, Result};
use crate::fractal::{member_bits, packing_dims, Coord2, FractalSpec};
use crate::intra::{build_lookup_table, IntraStrategy, LookupTable};
use crate::lambda::{map_unchecked, reduction_depth, Mutation};

/// How blocks are placed on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mapping {
    /// Identity map over the full `n_b x n_b` block grid; threads outside the
    /// gasket are discarded by the membership test.
    BoundingBox,
    /// The packed `3^r_b` block orthotope mapped onto the gasket.
    Lambda,
}

impl Mapping {
    pub const ALL: [Mapping; 2] = [Mapping::BoundingBox, Mapping::Lambda];

    pub fn name(self) -> &'static str {
        match self {
            Mapping::BoundingBox => "bb",
            Mapping::Lambda => "lambda",
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bb" => Ok(Mapping::BoundingBox),
            "lambda" => Ok(Mapping::Lambda),
            _ => Err(Error::Config(format!("unknown mapping `{s}` (bb, lambda)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaunchConfig {
    pub spec: FractalSpec,
    pub mapping: Mapping,
    /// Required for [`Mapping::Lambda`], ignored otherwise.
    pub strategy: Option<IntraStrategy>,
    /// Count writes per cell and fail the launch unless coverage is exact.
    pub verify_coverage: bool,
    #[doc(hidden)]
    pub mutation: Mutation,
}

impl LaunchConfig {
    pub fn bounding_box(spec: FractalSpec) -> Self {
        LaunchConfig {
            spec,
            mapping: Mapping::BoundingBox,
            strategy: None,
            verify_coverage: false,
            mutation: Mutation::None,
        }
    }

    pub fn lambda(spec: FractalSpec, strategy: IntraStrategy) -> Self {
        LaunchConfig {
            spec,
            mapping: Mapping::Lambda,
            strategy: Some(strategy),
            verify_coverage: false,
            mutation: Mutation::None,
        }
    }

    pub fn with_coverage(mut self) -> Self {
        self.verify_coverage = true;
        self
    }

    #[doc(hidden)]
    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if grid.n() != self.spec.n() {
            return Err(Error::Config(format!(
                "grid edge {} does not match spec edge {}",
                grid.n(),
                self.spec.n()
            )));
        }
        if self.mapping == Mapping::Lambda && self.strategy.is_none() {
            return Err(Error::Config(
                "lambda mapping needs an intra-block strategy".into(),
            ));
        }
        Ok(())
    }
}

/// Counters from one launch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WorkMetrics {
    pub blocks_launched: u64,
    pub threads_launched: u64,
    /// Threads whose kernel wrote a cell.
    pub threads_useful: u64,
    /// Block-map terms, membership tests and table reads.
    pub map_ops: u64,
    pub reduction_depth: u32,
    /// `map_ops + threads_useful`.
    pub simulated_cost: u64,
    pub wall_ns: f64,
}

impl WorkMetrics {
    /// Same counters, ignoring wall time.
    pub fn same_work(&self, other: &WorkMetrics) -> bool {
        WorkMetrics {
            wall_ns: 0.0,
            ..*self
        } == WorkMetrics {
            wall_ns: 0.0,
            ..*other
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Tally {
    threads: u64,
    useful: u64,
    map_ops: u64,
    outside: Vec<Coord2>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.threads += other.threads;
        self.useful += other.useful;
        self.map_ops += other.map_ops;
        self.outside.extend(other.outside);
        self
    }
}

struct Writer<'a, K> {
    n: u64,
    out: &'a [AtomicU32],
    counts: Option<&'a [AtomicU32]>,
    input: GridView<'a>,
    kernel: &'a K,
}

impl<K: CellKernel> Writer<'_, K> {
    #[inline(always)]
    fn write(&self, cell: Coord2, tally: &mut Tally) {
        if cell.x >= self.n || cell.y >= self.n {
            tally.outside.push(cell);
            return;
        }
        let idx = (cell.y * self.n + cell.x) as usize;
        self.out[idx].store(self.kernel.apply(cell, self.input), Ordering::Relaxed);
        if let Some(counts) = self.counts {
            counts[idx].fetch_add(1, Ordering::Relaxed);
        }
        tally.useful += 1;
    }
}

/// Blocks handed to a worker at a time.
const MIN_BLOCKS_PER_TASK: usize = 64;

fn run<K: CellKernel>(
    config: &LaunchConfig,
    kernel: &K,
    grid: &mut Grid,
    counts: Option<&[AtomicU32]>,
) -> Result<(WorkMetrics, Vec<Coord2>)> {
    config.check(grid)?;
    let spec = config.spec;
    let (n, rho, r_b, r_local) = (spec.n(), spec.rho(), spec.r_b(), spec.r_local());

    let snapshot = kernel.reads_input().then(|| grid.cells().to_vec());
    let input = match &snapshot {
        Some(cells) => GridView::from_slice(n, cells),
        None => GridView::empty(n),
    };
    let table: Option<LookupTable> = match (config.mapping, config.strategy) {
        (Mapping::Lambda, Some(IntraStrategy::SharedLookupTable)) if rho > 1 => {
            Some(build_lookup_table(rho)?)
        }
        _ => None,
    };
    let thread_dims = packing_dims(r_local)?;
    let block_dims = packing_dims(r_b)?;

    let start = Instant::now();
    let writer = Writer {
        n,
        out: grid.as_atomic(),
        counts,
        input,
        kernel,
    };

    let (blocks, depth, tally) = match config.mapping {
        Mapping::BoundingBox => {
            let n_b = spec.n_b();
            let blocks = n_b * n_b;
            let tally = (0..blocks as usize)
                .into_par_iter()
                .with_min_len(MIN_BLOCKS_PER_TASK)
                .fold(Tally::default, |mut t, b| {
                    let b = b as u64;
                    let (ox, oy) = ((b % n_b) * rho, (b / n_b) * rho);
                    for ty in 0..rho {
                        for tx in 0..rho {
                            let (x, y) = (ox + tx, oy + ty);
                            if member_bits(x, y, n) {
                                writer.write(Coord2::new(x, y), &mut t);
                            }
                        }
                    }
                    t.threads += rho * rho;
                    t.map_ops += rho * rho;
                    t
                })
                .reduce(Tally::default, Tally::merge);
            (blocks, 0, tally)
        }
        Mapping::Lambda => {
            let strategy = config.strategy.expect("checked above");
            let blocks = block_dims.area();
            let mutation = config.mutation;
            let table = table.as_ref();
            let tally = (0..blocks as usize)
                .into_par_iter()
                .with_min_len(MIN_BLOCKS_PER_TASK)
                .fold(Tally::default, |mut t, b| {
                    let block = map_unchecked(block_dims.coord_of(b as u64), r_b, mutation);
                    let origin = Coord2::new(block.x * rho, block.y * rho);
                    t.map_ops += r_b as u64;
                    if rho == 1 {
                        t.threads += 1;
                        writer.write(origin, &mut t);
                        return t;
                    }
                    let at = |l: Coord2| Coord2::new(origin.x + l.x, origin.y + l.y);
                    match strategy {
                        IntraStrategy::FurtherUnrolling => {
                            let count = thread_dims.area();
                            for i in 0..count {
                                let local =
                                    map_unchecked(thread_dims.coord_of(i), r_local, Mutation::None);
                                writer.write(at(local), &mut t);
                            }
                            t.threads += count;
                            t.map_ops += count * r_local as u64;
                        }
                        IntraStrategy::SharedLookupTable => {
                            let entries = table.expect("built above").entries();
                            for &local in entries {
                                writer.write(at(local), &mut t);
                            }
                            t.threads += entries.len() as u64;
                            t.map_ops += entries.len() as u64;
                        }
                        IntraStrategy::BoundingSubBox => {
                            for ty in 0..rho {
                                for tx in 0..rho {
                                    if member_bits(tx, ty, rho) {
                                        writer.write(at(Coord2::new(tx, ty)), &mut t);
                                    }
                                }
                            }
                            t.threads += rho * rho;
                            t.map_ops += rho * rho;
                        }
                    }
                    t
                })
                .reduce(Tally::default, Tally::merge);
            (blocks, reduction_depth(r_b), tally)
        }
    };
    let wall_ns = start.elapsed().as_nanos() as f64;

    let metrics = WorkMetrics {
        blocks_launched: blocks,
        threads_launched: tally.threads,
        threads_useful: tally.useful,
        map_ops: tally.map_ops,
        reduction_depth: depth,
        simulated_cost: tally.map_ops + tally.useful,
        wall_ns,
    };
    debug_assert!(metrics.threads_useful <= metrics.threads_launched);
    Ok((metrics, tally.outside))
}

fn counters(n: u64) -> Vec<AtomicU32> {
    (0..n * n).map(|_| AtomicU32::new(0)).collect()
}

fn traced<K: CellKernel>(
    config: &LaunchConfig,
    kernel: &K,
    grid: &mut Grid,
) -> Result<(WorkMetrics, CoverageReport)> {
    let counts = counters(config.spec.n());
    let (metrics, outside) = run(config, kernel, grid, Some(&counts))?;
    let counts = counts.into_iter().map(AtomicU32::into_inner).collect();
    Ok((
        metrics,
        CoverageReport::from_counts(config.spec.n(), counts, outside),
    ))
}

fn launch_in<K: CellKernel>(
    config: &LaunchConfig,
    kernel: &K,
    grid: &mut Grid,
) -> Result<WorkMetrics> {
    if config.verify_coverage {
        let (metrics, report) = traced(config, kernel, grid)?;
        if !report.is_exact() {
            return Err(Error::Coverage(Box::new(report)));
        }
        return Ok(metrics);
    }
    let (metrics, outside) = run(config, kernel, grid, None)?;
    if let Some(first) = outside.first() {
        return Err(Error::Config(format!(
            "mapping placed {} threads outside the grid, first at {first}",
            outside.len()
        )));
    }
    Ok(metrics)
}

/// Launch engine with its own worker pool.
pub struct Engine {
    pool: rayon::ThreadPool,
}

impl Engine {
    /// `workers == 0` picks the available hardware parallelism.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
        Ok(Engine { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn launch<K: CellKernel>(
        &self,
        config: &LaunchConfig,
        kernel: &K,
        grid: &mut Grid,
    ) -> Result<WorkMetrics> {
        self.pool.install(|| launch_in(config, kernel, grid))
    }

    /// Launch with per-cell write counters; never fails on a coverage violation.
    pub fn launch_traced<K: CellKernel>(
        &self,
        config: &LaunchConfig,
        kernel: &K,
        grid: &mut Grid,
    ) -> Result<(WorkMetrics, CoverageReport)> {
        self.pool.install(|| traced(config, kernel, grid))
    }
}

/// Launch on the global rayon pool.
pub fn launch<K: CellKernel>(
    config: &LaunchConfig,
    kernel: &K,
    grid: &mut Grid,
) -> Result<WorkMetrics> {
    launch_in(config, kernel, grid)
}

/// Runs the constant-write kernel with write counters and reports coverage.
pub fn verify_coverage(config: &LaunchConfig, grid: &mut Grid) -> Result<CoverageReport> {
    traced(config, &ConstantWrite(1), grid).map(|(_, report)| report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::enumerate_cells;
    use crate::sim::NeighborCount;

    fn spec(n: u64, rho: u64) -> FractalSpec {
        FractalSpec::new(n, rho).unwrap()
    }

    fn all_configs(s: FractalSpec) -> Vec<LaunchConfig> {
        std::iter::once(LaunchConfig::bounding_box(s))
            .chain(IntraStrategy::ALL.map(|k| LaunchConfig::lambda(s, k)))
            .collect()
    }

    #[test]
    fn single_cell() {
        for cfg in all_configs(spec(1, 1)) {
            let mut g = Grid::new(1).unwrap();
            let m = launch(&cfg, &ConstantWrite(7), &mut g).unwrap();
            assert_eq!(g.cells(), &[7]);
            assert_eq!(m.threads_useful, 1);
        }
    }

    #[test]
    fn subbox_n8_rho2() {
        let mut g = Grid::new(8).unwrap();
        let cfg = LaunchConfig::lambda(spec(8, 2), IntraStrategy::BoundingSubBox);
        launch(&cfg, &ConstantWrite(7), &mut g).unwrap();
        assert_eq!(g.cells().iter().filter(|&&v| v == 7).count(), 27);
        assert_eq!(g.cells().iter().filter(|&&v| v == 0).count(), 37);
        for c in enumerate_cells(8).unwrap() {
            assert_eq!(g.get(c), 7);
        }
    }

    #[test]
    fn n64_rho8_counts() {
        let s = spec(64, 8);
        let mut g = Grid::new(64).unwrap();
        let bb = launch(&LaunchConfig::bounding_box(s), &ConstantWrite(1), &mut g).unwrap();
        assert_eq!(
            (bb.blocks_launched, bb.threads_launched, bb.threads_useful),
            (64, 4096, 729)
        );
        assert_eq!(bb.reduction_depth, 0);
        let mut g = Grid::new(64).unwrap();
        let cfg = LaunchConfig::lambda(s, IntraStrategy::BoundingSubBox);
        let lm = launch(&cfg, &ConstantWrite(1), &mut g).unwrap();
        assert_eq!(
            (lm.blocks_launched, lm.threads_launched, lm.threads_useful),
            (27, 1728, 729)
        );
        assert_eq!(lm.reduction_depth, 2);
    }

    #[test]
    fn config_errors() {
        let mut g = Grid::new(16).unwrap();
        let cfg = LaunchConfig::bounding_box(spec(8, 2));
        assert!(matches!(
            launch(&cfg, &ConstantWrite(1), &mut g),
            Err(Error::Config(_))
        ));
        let mut cfg = LaunchConfig::lambda(spec(16, 2), IntraStrategy::BoundingSubBox);
        cfg.strategy = None;
        assert!(matches!(
            launch(&cfg, &ConstantWrite(1), &mut g),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn coverage_reports() {
        for n in [1u64, 8, 64, 512] {
            for rho in [1u64, 2, 8] {
                if rho > n {
                    continue;
                }
                for cfg in all_configs(spec(n, rho)) {
                    let mut g = Grid::new(n).unwrap();
                    let rep = verify_coverage(&cfg, &mut g).unwrap();
                    assert!(rep.is_exact(), "{cfg:?}");
                }
            }
        }
    }

    #[test]
    fn corrupted_divisor_leaves_misses() {
        let cfg = LaunchConfig::lambda(spec(8, 1), IntraStrategy::BoundingSubBox)
            .with_mutation(Mutation::Divisor);
        let mut g = Grid::new(8).unwrap();
        let rep = verify_coverage(&cfg, &mut g).unwrap();
        assert!(!rep.misses.is_empty());
        let mut g = Grid::new(8).unwrap();
        let err = launch(&cfg.with_coverage(), &ConstantWrite(1), &mut g).unwrap_err();
        assert!(matches!(err, Error::Coverage(_)));
    }

    #[test]
    fn offset_mutation_writes_outside_grid() {
        let cfg = LaunchConfig::lambda(spec(16, 2), IntraStrategy::SharedLookupTable)
            .with_mutation(Mutation::Offset);
        let mut g = Grid::new(16).unwrap();
        assert!(matches!(
            launch(&cfg, &ConstantWrite(1), &mut g),
            Err(Error::Config(_))
        ));
        let mut g = Grid::new(16).unwrap();
        let rep = verify_coverage(&cfg, &mut g).unwrap();
        assert!(!rep.strays.is_empty());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = spec(256, 4);
        let one = Engine::new(1).unwrap();
        let four = Engine::new(4).unwrap();
        for cfg in all_configs(s) {
            let (mut a, mut b) = (Grid::new(256).unwrap(), Grid::new(256).unwrap());
            let ma = one.launch(&cfg, &ConstantWrite(3), &mut a).unwrap();
            let mb = four.launch(&cfg, &ConstantWrite(3), &mut b).unwrap();
            assert_eq!(a, b);
            assert!(ma.same_work(&mb));
        }
    }

    #[test]
    fn stencil_reads_snapshot() {
        let s = spec(16, 4);
        let mut seeded = Grid::new(16).unwrap();
        launch(
            &LaunchConfig::bounding_box(s),
            &ConstantWrite(1),
            &mut seeded,
        )
        .unwrap();
        let mut by_bb = seeded.clone();
        let mut by_lambda = seeded.clone();
        launch(&LaunchConfig::bounding_box(s), &NeighborCount, &mut by_bb).unwrap();
        launch(
            &LaunchConfig::lambda(s, IntraStrategy::FurtherUnrolling),
            &NeighborCount,
            &mut by_lambda,
        )
        .unwrap();
        assert_eq!(by_bb, by_lambda);
        // apex (0,0) touches (0,1) and (1,1)
        assert_eq!(by_bb.get(Coord2::ORIGIN), 2);
    }
}
