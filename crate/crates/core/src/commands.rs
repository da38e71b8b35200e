//! Front ends behind the `sierpinski-bench` subcommands.
//!
//! Each command returns a report value; the binary only parses flags,
//! prints and picks the exit status.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::{run_sweep_with, write_csv, BenchRecord, RepScheme, RowStatus, SweepConfig};
use crate::error::{Error, Result};
use crate::fractal::{
    enumerate_cells, hausdorff_exponent, packing_dims, volume, FractalSpec, MAX_SCALE,
};
use crate::intra::{strategy_cells, IntraStrategy};
use crate::lambda::{suggested_block_threads, verify_bijection_with, Mutation};
use crate::render::{self, Raster, RenderMode};
use crate::sim::{predicted_block_ratio, Engine, Grid, LaunchConfig, Mapping};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub r_max: u32,
    pub checks: Vec<CheckOutcome>,
    /// Cells covered by the largest bijection check.
    pub cells_checked: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {:<28} {}", c.name, c.detail)?;
        }
        match self.first_failure() {
            None => write!(
                f,
                "all {} checks passed up to r = {}; {} cells checked",
                self.checks.len(),
                self.r_max,
                self.cells_checked
            ),
            Some(c) => write!(f, "first failure: {}: {}", c.name, c.detail),
        }
    }
}

/// Largest level the coverage launches in `verify` go to.
const VERIFY_LAUNCH_MAX_R: u32 = 10;
const VERIFY_RHOS: [u64; 4] = [1, 2, 4, 8];

/// Volume, bijection, strategy-equivalence and coverage checks for
/// `r = 0..=r_max`. `mutation` corrupts the block map for every check that uses it.
pub fn verify(r_max: u32, mutation: Mutation) -> Result<VerifyReport> {
    if r_max > 12 {
        return Err(Error::out_of_range("r_max", r_max as u64, "0..=12"));
    }
    let mut checks = Vec::new();
    let mut check = |name: String, passed: bool, detail: String| {
        checks.push(CheckOutcome {
            name,
            passed,
            detail,
        });
    };

    for r in 0..=r_max {
        let cells = enumerate_cells(1 << r)?.len() as u64;
        let want = volume(r)?;
        check(
            format!("volume r={r}"),
            cells == want,
            format!("{cells} cells, expected {want}"),
        );
    }

    for r in 0..=r_max {
        let rep = verify_bijection_with(r, mutation)?;
        let detail = match rep.witness {
            None if rep.is_bijection() => format!(
                "{} blocks onto {} cells",
                packing_dims(r)?.area(),
                rep.image_size
            ),
            w => format!(
                "{} duplicates, {} misses, witness omega = {}",
                rep.duplicates,
                rep.misses,
                w.map_or("none".into(), |w| w.to_string())
            ),
        };
        check(format!("bijection r_b={r}"), rep.is_bijection(), detail);
    }

    for rl in 0..=r_max.min(6) {
        let rho = 1u64 << rl;
        let oracle: BTreeSet<_> = enumerate_cells(rho)?.into_iter().collect();
        let mut bad = Vec::new();
        for s in IntraStrategy::ALL {
            let cells = strategy_cells(s, rho)?;
            let set: BTreeSet<_> = cells.iter().copied().collect();
            if set.len() != cells.len() || set != oracle {
                bad.push(s.name());
            }
        }
        let detail = if bad.is_empty() {
            format!("3 strategies agree on {} cells", oracle.len())
        } else {
            format!("mismatch: {}", bad.join(", "))
        };
        check(format!("strategies rho={rho}"), bad.is_empty(), detail);
    }

    for r in 0..=r_max.min(VERIFY_LAUNCH_MAX_R) {
        let n = 1u64 << r;
        for rho in VERIFY_RHOS.into_iter().filter(|&rho| rho <= n) {
            let spec = FractalSpec::new(n, rho)?;
            let configs = std::iter::once(LaunchConfig::bounding_box(spec)).chain(
                IntraStrategy::ALL.map(|s| LaunchConfig::lambda(spec, s).with_mutation(mutation)),
            );
            let mut failures = Vec::new();
            for cfg in configs {
                let mut grid = Grid::new(n)?;
                let rep = crate::sim::verify_coverage(&cfg, &mut grid)?;
                if !rep.is_exact() {
                    let label = cfg.strategy.map_or("bb", |s| s.name());
                    let first = rep
                        .misses
                        .first()
                        .or(rep.duplicates.first())
                        .or(rep.strays.first());
                    failures.push(format!(
                        "{label}: {} dup, {} miss, {} stray, first at {}",
                        rep.duplicates.len(),
                        rep.misses.len(),
                        rep.strays.len(),
                        first.map_or("?".into(), |c| c.to_string())
                    ));
                }
            }
            let detail = if failures.is_empty() {
                format!("{} cells written once under every mapping", volume(r)?)
            } else {
                failures.join("; ")
            };
            check(
                format!("coverage n={n} rho={rho}"),
                failures.is_empty(),
                detail,
            );
        }
    }

    Ok(VerifyReport {
        r_max,
        checks,
        cells_checked: volume(r_max)?,
    })
}

/// Runs a sweep, writes the CSV and returns the rows.
pub fn bench(
    config: &SweepConfig,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>> {
    let engine = Engine::new(config.workers)?;
    let rows = run_sweep_with(config, &engine, &mut progress)?;
    write_csv(&config.out, &rows)?;
    Ok(rows)
}

/// Lambda row with the largest wall-clock speedup, if any was measured.
pub fn best_speedup(rows: &[BenchRecord]) -> Option<&BenchRecord> {
    rows.iter()
        .filter(|r| r.mapping == Mapping::Lambda && r.status == RowStatus::Ok)
        .filter(|r| r.speedup.is_some())
        .max_by(|a, b| a.speedup.partial_cmp(&b.speedup).expect("finite speedups"))
}

pub fn render(
    n: u64,
    mode: RenderMode,
    rho: u64,
    strategy: IntraStrategy,
    out: &Path,
) -> Result<Raster> {
    let raster = match mode {
        RenderMode::Gasket => render::gasket(n)?,
        RenderMode::Coverage => render::coverage(n, rho, strategy)?,
        RenderMode::Blockmap => render::blockmap(n, rho)?,
    };
    raster.save(out)?;
    Ok(raster)
}

#[derive(Debug, Clone)]
pub struct InfoReport {
    pub r: u32,
    pub n: u64,
    pub volume: u64,
    pub width: u64,
    pub height: u64,
    pub hausdorff: f64,
    /// `None` below `n = 4`.
    pub brent_threads: Option<u64>,
    /// `(rho, n_b^(2-H))` for the default block edges that fit.
    pub block_ratios: Vec<(u64, f64)>,
}

pub fn info(r: u32) -> Result<InfoReport> {
    if r > MAX_SCALE {
        return Err(Error::out_of_range(
            "r",
            r as u64,
            format!("0..={MAX_SCALE}"),
        ));
    }
    let n = 1u64 << r;
    let dims = packing_dims(r)?;
    Ok(InfoReport {
        r,
        n,
        volume: volume(r)?,
        width: dims.width,
        height: dims.height,
        hausdorff: hausdorff_exponent(),
        brent_threads: suggested_block_threads(n).ok(),
        block_ratios: SweepConfig::default()
            .rho_set
            .into_iter()
            .filter(|&rho| rho <= n)
            .map(|rho| (rho, predicted_block_ratio(n / rho)))
            .collect(),
    })
}

impl fmt::Display for InfoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scale level r        {}", self.r)?;
        writeln!(f, "edge n               {}", self.n)?;
        writeln!(f, "volume 3^r           {}", self.volume)?;
        writeln!(f, "packed dims (w x h)  {}x{}", self.width, self.height)?;
        writeln!(f, "hausdorff exponent   {:.15}", self.hausdorff)?;
        match self.brent_threads {
            Some(t) => writeln!(f, "suggested threads    {t}")?,
            None => writeln!(f, "suggested threads    n/a (n < 4)")?,
        }
        write!(f, "block-count ratio n_b^(2-H):")?;
        for (rho, ratio) in &self.block_ratios {
            write!(f, "\n  rho={rho:<3} n_b={:<8} {ratio:.6}", self.n / rho)?;
        }
        Ok(())
    }
}

/// Flat `key = value` file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// `"8"` or `"8..12"` (inclusive).
pub fn parse_r_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Config(format!("bad r range `{s}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect()
}

/// Sweep settings before precedence is applied; `None` means unset.
#[derive(Debug, Clone, Default)]
pub struct SweepOverrides {
    pub r: Option<String>,
    pub rho: Option<String>,
    pub mapping: Option<String>,
    pub strategy: Option<String>,
    pub reps: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl SweepOverrides {
    pub fn from_map(map: &HashMap<String, String>) -> Result<Self> {
        let known = ["r", "rho", "mapping", "strategy", "reps", "out", "workers"];
        if let Some(k) = map.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown config key `{k}`")));
        }
        Ok(SweepOverrides {
            r: map.get("r").cloned(),
            rho: map.get("rho").cloned(),
            mapping: map.get("mapping").cloned(),
            strategy: map.get("strategy").cloned(),
            reps: map.get("reps").cloned(),
            out: map.get("out").map(PathBuf::from),
            workers: map
                .get("workers")
                .map(|w| {
                    w.parse()
                        .map_err(|_| Error::Config(format!("bad workers `{w}`")))
                })
                .transpose()?,
        })
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: SweepOverrides) -> SweepOverrides {
        SweepOverrides {
            r: self.r.or(lower.r),
            rho: self.rho.or(lower.rho),
            mapping: self.mapping.or(lower.mapping),
            strategy: self.strategy.or(lower.strategy),
            reps: self.reps.or(lower.reps),
            out: self.out.or(lower.out),
            workers: self.workers.or(lower.workers),
        }
    }

    /// Fills unset fields from [`SweepConfig::default`].
    pub fn resolve(self) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        if let Some(r) = &self.r {
            (cfg.r_min, cfg.r_max) = parse_r_range(r)?;
        }
        if let Some(rho) = &self.rho {
            cfg.rho_set = parse_list(rho, |t| {
                t.parse()
                    .map_err(|_| Error::Config(format!("bad rho `{t}`")))
            })?;
        }
        if let Some(m) = &self.mapping {
            cfg.mappings = parse_list(m, str::parse)?;
        }
        if let Some(s) = &self.strategy {
            cfg.strategies = if s == "all" {
                IntraStrategy::ALL.to_vec()
            } else {
                parse_list(s, str::parse)?
            };
        }
        if let Some(reps) = &self.reps {
            cfg.reps = reps.parse::<RepScheme>()?;
        }
        if let Some(out) = self.out {
            cfg.out = out;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
