//! Parameter sweeps over `(r, rho, mapping, strategy)` and their CSV format.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fractal::FractalSpec;
use crate::intra::IntraStrategy;
use crate::sim::{
    simulated_cost, ConstantWrite, Engine, Grid, LaunchConfig, Mapping, WorkMetrics, MAX_GRID_EDGE,
};

pub const CSV_HEADER: &str =
    "mapping,strategy,r,n,rho,blocks_launched,threads_launched,threads_useful,\
map_ops,reduction_depth,simulated_cost,wall_ns_mean,wall_ns_stderr,cost_ratio,speedup,status";

/// Default grid budget: `2^13 x 2^13` cells of 4 bytes.
pub const DEFAULT_MEM_LIMIT: u64 = 256 << 20;

/// Timing repetitions: `sub_averages` means, each over `runs_per_sub` launches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepScheme {
    pub sub_averages: u32,
    pub runs_per_sub: u32,
}

impl Default for RepScheme {
    fn default() -> Self {
        RepScheme {
            sub_averages: 100,
            runs_per_sub: 10,
        }
    }
}

impl FromStr for RepScheme {
    type Err = Error;

    /// `"100x10"`, or a bare `"5"` for five single-run sub-averages.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "bad repetition scheme `{s}` (expected e.g. 100x10)"
            ))
        };
        let (a, b) = s.split_once('x').unwrap_or((s, "1"));
        let scheme = RepScheme {
            sub_averages: a.trim().parse().map_err(|_| bad())?,
            runs_per_sub: b.trim().parse().map_err(|_| bad())?,
        };
        if scheme.sub_averages == 0 || scheme.runs_per_sub == 0 {
            return Err(bad());
        }
        Ok(scheme)
    }
}

impl fmt::Display for RepScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.sub_averages, self.runs_per_sub)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Inclusive scale-level range.
    pub r_min: u32,
    pub r_max: u32,
    pub rho_set: Vec<u64>,
    pub mappings: Vec<Mapping>,
    pub strategies: Vec<IntraStrategy>,
    pub reps: RepScheme,
    pub out: PathBuf,
    /// 0 = hardware parallelism.
    pub workers: usize,
    /// Rows whose grid would exceed this many bytes are skipped.
    pub mem_limit: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            r_min: 0,
            r_max: 16,
            rho_set: vec![1, 2, 4, 8, 16, 32],
            mappings: Mapping::ALL.to_vec(),
            strategies: IntraStrategy::ALL.to_vec(),
            reps: RepScheme::default(),
            out: PathBuf::from("bench.csv"),
            workers: 0,
            mem_limit: DEFAULT_MEM_LIMIT,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r_min > self.r_max {
            return Err(Error::Config(format!(
                "empty r range {}..{}",
                self.r_min, self.r_max
            )));
        }
        if self.r_max > 40 {
            return Err(Error::out_of_range("r", self.r_max as u64, "0..=40"));
        }
        if let Some(&rho) = self.rho_set.iter().find(|r| !r.is_power_of_two()) {
            return Err(Error::InvalidSize(rho));
        }
        if self.rho_set.is_empty() || self.mappings.is_empty() {
            return Err(Error::Config("nothing to sweep".into()));
        }
        if self.mappings.contains(&Mapping::Lambda) && self.strategies.is_empty() {
            return Err(Error::Config(
                "lambda mapping needs at least one strategy".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    SkippedMem,
    SkippedShape,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::SkippedMem => "skipped-mem",
            RowStatus::SkippedShape => "skipped-shape",
        }
    }
}

impl FromStr for RowStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            RowStatus::Ok,
            RowStatus::SkippedMem,
            RowStatus::SkippedShape,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown row status `{s}`")))
    }
}

/// One CSV row. Skipped rows carry no metrics or timings.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub mapping: Mapping,
    /// `None` for bounding-box rows.
    pub strategy: Option<IntraStrategy>,
    pub r: u32,
    pub n: u64,
    pub rho: u64,
    /// Counters of the launch; `wall_ns` holds the mean over repetitions.
    pub metrics: Option<WorkMetrics>,
    pub wall_ns_stderr: Option<f64>,
    pub cost_ratio: Option<f64>,
    pub speedup: Option<f64>,
    pub status: RowStatus,
}

/// Rounds to the six significant digits written to CSV.
pub fn round6(v: f64) -> f64 {
    fmt6(v).parse().expect("formatted float parses")
}

fn fmt6(v: f64) -> String {
    format!("{v:.5e}")
}

impl BenchRecord {
    fn skipped(
        mapping: Mapping,
        strategy: Option<IntraStrategy>,
        r: u32,
        rho: u64,
        status: RowStatus,
    ) -> Self {
        BenchRecord {
            mapping,
            strategy,
            r,
            n: 1u64 << r,
            rho,
            metrics: None,
            wall_ns_stderr: None,
            cost_ratio: None,
            speedup: None,
            status,
        }
    }

    fn to_fields(&self) -> Vec<String> {
        let int = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
        let float = |v: Option<f64>| v.map(fmt6).unwrap_or_default();
        let m = self.metrics.as_ref();
        vec![
            self.mapping.name().to_string(),
            self.strategy.map_or("none", |s| s.name()).to_string(),
            self.r.to_string(),
            self.n.to_string(),
            self.rho.to_string(),
            int(m.map(|m| m.blocks_launched)),
            int(m.map(|m| m.threads_launched)),
            int(m.map(|m| m.threads_useful)),
            int(m.map(|m| m.map_ops)),
            int(m.map(|m| m.reduction_depth as u64)),
            int(m.map(|m| m.simulated_cost)),
            float(m.map(|m| m.wall_ns)),
            float(self.wall_ns_stderr),
            float(self.cost_ratio),
            float(self.speedup),
            self.status.name().to_string(),
        ]
    }

    fn from_fields(row: &csv::StringRecord) -> Result<Self> {
        if row.len() != 16 {
            return Err(Error::Config(format!(
                "expected 16 columns, found {}",
                row.len()
            )));
        }
        let bad = |col: &str, v: &str| Error::Config(format!("bad {col} value `{v}`"));
        let int = |i: usize| -> Result<Option<u64>> {
            let v = &row[i];
            if v.is_empty() {
                return Ok(None);
            }
            v.parse().map(Some).map_err(|_| bad("integer", v))
        };
        let float = |i: usize| -> Result<Option<f64>> {
            let v = &row[i];
            if v.is_empty() {
                return Ok(None);
            }
            v.parse().map(Some).map_err(|_| bad("float", v))
        };
        let strategy = match &row[1] {
            "none" => None,
            s => Some(s.parse()?),
        };
        let metrics = match (int(5)?, int(6)?, int(7)?, int(8)?, int(9)?, int(10)?) {
            (Some(b), Some(t), Some(u), Some(ops), Some(d), Some(c)) => Some(WorkMetrics {
                blocks_launched: b,
                threads_launched: t,
                threads_useful: u,
                map_ops: ops,
                reduction_depth: d as u32,
                simulated_cost: c,
                wall_ns: float(11)?.unwrap_or(0.0),
            }),
            _ => None,
        };
        Ok(BenchRecord {
            mapping: row[0].parse()?,
            strategy,
            r: row[2].parse().map_err(|_| bad("r", &row[2]))?,
            n: row[3].parse().map_err(|_| bad("n", &row[3]))?,
            rho: row[4].parse().map_err(|_| bad("rho", &row[4]))?,
            metrics,
            wall_ns_stderr: float(12)?,
            cost_ratio: float(13)?,
            speedup: float(14)?,
            status: row[15].parse()?,
        })
    }
}

/// Mean and standard error of the sub-averages, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub mean_ns: f64,
    pub stderr_ns: f64,
}

fn mean_stderr(samples: &[f64]) -> Timing {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let stderr = if samples.len() > 1 {
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Timing {
        mean_ns: mean,
        stderr_ns: stderr,
    }
}

/// Launches `config` repeatedly with the constant-write kernel.
///
/// Returns the counters of the first launch and the timing statistics.
pub fn time_launch(
    engine: &Engine,
    config: &LaunchConfig,
    grid: &mut Grid,
    reps: RepScheme,
) -> Result<(WorkMetrics, Timing)> {
    let kernel = ConstantWrite(1);
    let first = engine.launch(config, &kernel, grid)?;
    let mut subs = Vec::with_capacity(reps.sub_averages as usize);
    for _ in 0..reps.sub_averages {
        let mut total = 0.0;
        for _ in 0..reps.runs_per_sub {
            total += engine.launch(config, &kernel, grid)?.wall_ns;
        }
        subs.push(total / reps.runs_per_sub as f64);
    }
    Ok((first, mean_stderr(&subs)))
}

/// Runs every `(r, rho, mapping, strategy)` combination in order.
pub fn run_sweep(config: &SweepConfig, engine: &Engine) -> Result<Vec<BenchRecord>> {
    run_sweep_with(config, engine, |_| {})
}

/// Like [`run_sweep`], calling `progress` after each row.
pub fn run_sweep_with(
    config: &SweepConfig,
    engine: &Engine,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut push = |rec: BenchRecord, rows: &mut Vec<BenchRecord>| {
        progress(&rec);
        rows.push(rec);
    };
    let lambda_strategies: &[IntraStrategy] = if config.mappings.contains(&Mapping::Lambda) {
        &config.strategies
    } else {
        &[]
    };
    for r in config.r_min..=config.r_max {
        let n = 1u64 << r;
        for &rho in &config.rho_set {
            let combos = config
                .mappings
                .iter()
                .filter(|&&m| m == Mapping::BoundingBox)
                .map(|&m| (m, None))
                .chain(
                    lambda_strategies
                        .iter()
                        .map(|&s| (Mapping::Lambda, Some(s))),
                );
            let status = if rho > n {
                RowStatus::SkippedShape
            } else if n > MAX_GRID_EDGE || Grid::footprint(n) > config.mem_limit {
                RowStatus::SkippedMem
            } else {
                RowStatus::Ok
            };
            if status != RowStatus::Ok {
                for (m, s) in combos {
                    push(BenchRecord::skipped(m, s, r, rho, status), &mut rows);
                }
                continue;
            }

            let spec = FractalSpec::new(n, rho)?;
            let bb_cost = simulated_cost(&spec, Mapping::BoundingBox, None)?;
            let mut grid = Grid::new(n)?;
            let mut bb_wall = None;
            for (mapping, strategy) in combos {
                let launch = match strategy {
                    None => LaunchConfig::bounding_box(spec),
                    Some(s) => LaunchConfig::lambda(spec, s),
                };
                grid.clear();
                let (mut metrics, timing) = time_launch(engine, &launch, &mut grid, config.reps)?;
                metrics.wall_ns = round6(timing.mean_ns);
                let (cost_ratio, speedup) = match mapping {
                    Mapping::BoundingBox => {
                        bb_wall = Some(metrics.wall_ns);
                        (1.0, Some(1.0))
                    }
                    Mapping::Lambda => (
                        bb_cost as f64 / metrics.simulated_cost as f64,
                        bb_wall.map(|bb| bb / metrics.wall_ns),
                    ),
                };
                push(
                    BenchRecord {
                        mapping,
                        strategy,
                        r,
                        n,
                        rho,
                        metrics: Some(metrics),
                        wall_ns_stderr: Some(round6(timing.stderr_ns)),
                        cost_ratio: Some(round6(cost_ratio)),
                        speedup: speedup.map(round6),
                        status: RowStatus::Ok,
                    },
                    &mut rows,
                );
            }
        }
    }
    Ok(rows)
}

pub fn write_records<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for rec in records {
        w.write_record(rec.to_fields())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    write_records(std::io::BufWriter::new(file), records)?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_records<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header `{header}`")));
    }
    rdr.records()
        .map(|row| BenchRecord::from_fields(&row?))
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::cost_ratio;
    use proptest::prelude::*;

    fn quick(r_min: u32, r_max: u32, rho: Vec<u64>) -> SweepConfig {
        SweepConfig {
            r_min,
            r_max,
            rho_set: rho,
            reps: RepScheme {
                sub_averages: 2,
                runs_per_sub: 1,
            },
            ..SweepConfig::default()
        }
    }

    #[test]
    fn rep_scheme_parsing() {
        assert_eq!("100x10".parse::<RepScheme>().unwrap(), RepScheme::default());
        assert_eq!(
            "3".parse::<RepScheme>().unwrap(),
            RepScheme {
                sub_averages: 3,
                runs_per_sub: 1
            }
        );
        assert!("0x10".parse::<RepScheme>().is_err());
        assert!("ax1".parse::<RepScheme>().is_err());
    }

    #[test]
    fn r6_rho8_ratio() {
        let engine = Engine::new(1).unwrap();
        let rows = run_sweep(&quick(6, 6, vec![8]), &engine).unwrap();
        assert_eq!(rows.len(), 4);
        let bb = rows[0].metrics.unwrap();
        assert_eq!(bb.blocks_launched, 64);
        for row in &rows[1..] {
            let m = row.metrics.unwrap();
            assert_eq!(m.blocks_launched, 27);
            let want =
                cost_ratio(&FractalSpec::new(64, 8).unwrap(), row.strategy.unwrap()).unwrap();
            assert_eq!(row.cost_ratio.unwrap(), round6(want));
            assert_eq!(
                row.cost_ratio.unwrap(),
                round6(bb.simulated_cost as f64 / m.simulated_cost as f64)
            );
        }
    }

    #[test]
    fn single_cell_row() {
        let engine = Engine::new(1).unwrap();
        let rows = run_sweep(&quick(0, 0, vec![1]), &engine).unwrap();
        assert!(rows.iter().all(|r| r.metrics.unwrap().threads_useful == 1));
    }

    #[test]
    fn skipped_rows() {
        let engine = Engine::new(1).unwrap();
        let mut cfg = quick(1, 2, vec![4]);
        cfg.mem_limit = 32;
        let rows = run_sweep(&cfg, &engine).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows[..4]
            .iter()
            .all(|r| r.status == RowStatus::SkippedShape));
        // 4x4 grid is 64 bytes > 32
        assert!(rows[4..]
            .iter()
            .all(|r| r.status == RowStatus::SkippedMem && r.metrics.is_none()));
    }

    #[test]
    fn ratio_increases_down_rows() {
        let engine = Engine::new(1).unwrap();
        let mut cfg = quick(8, 12, vec![16]);
        cfg.reps = RepScheme {
            sub_averages: 1,
            runs_per_sub: 1,
        };
        let rows = run_sweep(&cfg, &engine).unwrap();
        for s in IntraStrategy::ALL {
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.strategy == Some(s))
                .map(|r| r.cost_ratio.unwrap())
                .collect();
            assert_eq!(ratios.len(), 5);
            assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{s}: {ratios:?}");
        }
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "mapping,strategy,r,n,rho,blocks_launched,threads_launched,threads_useful,map_ops,\
reduction_depth,simulated_cost,wall_ns_mean,wall_ns_stderr,cost_ratio,speedup,status\n"
        );
    }

    fn any_record() -> impl Strategy<Value = BenchRecord> {
        let metrics = proptest::option::of(
            (
                any::<u64>(),
                any::<u64>(),
                any::<u64>(),
                any::<u64>(),
                0u32..64,
                any::<u64>(),
                0f64..1e12,
            )
                .prop_map(|(b, t, u, o, d, c, w)| WorkMetrics {
                    blocks_launched: b,
                    threads_launched: t,
                    threads_useful: u,
                    map_ops: o,
                    reduction_depth: d,
                    simulated_cost: c,
                    wall_ns: round6(w),
                }),
        );
        let float = || proptest::option::of((1e-6f64..1e9).prop_map(round6));
        (
            prop_oneof![Just(Mapping::BoundingBox), Just(Mapping::Lambda)],
            proptest::option::of(proptest::sample::select(IntraStrategy::ALL.to_vec())),
            0u32..=40,
            proptest::sample::select(vec![1u64, 2, 4, 8, 16, 32]),
            metrics,
            float(),
            float(),
            float(),
            proptest::sample::select(vec![
                RowStatus::Ok,
                RowStatus::SkippedMem,
                RowStatus::SkippedShape,
            ]),
        )
            .prop_map(|(mapping, strategy, r, rho, metrics, se, cr, sp, status)| {
                BenchRecord {
                    mapping,
                    strategy,
                    r,
                    n: 1 << r,
                    rho,
                    metrics,
                    wall_ns_stderr: se,
                    cost_ratio: cr,
                    speedup: sp,
                    status,
                }
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(records in proptest::collection::vec(any_record(), 0..8)) {
            let mut buf = Vec::new();
            write_records(&mut buf, &records).unwrap();
            let back = read_records(buf.as_slice()).unwrap();
            prop_assert_eq!(back, records);
        }
    }
}
