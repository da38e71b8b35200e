use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sierpinski_blockmap::commands::{self, read_config_file, SweepOverrides};
use sierpinski_blockmap::lambda::Mutation;
use sierpinski_blockmap::render::RenderMode;
use sierpinski_blockmap::{Error, IntraStrategy};

#[derive(Parser)]
#[command(
    version,
    about = "Sierpinski gasket block-map verifier, benchmark and renderer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the oracle checks up to a scale level.
    Verify {
        #[arg(long, default_value_t = 10)]
        r_max: u32,
        #[arg(long, hide = true, value_parser = parse_mutation)]
        inject_mutation: Option<Mutation>,
    },
    /// Sweep (r, rho, mapping, strategy) and write a CSV.
    Bench {
        /// Scale level or inclusive range, e.g. `8..12`.
        #[arg(long)]
        r: Option<String>,
        /// Comma-separated block edges.
        #[arg(long)]
        rho: Option<String>,
        /// `bb`, `lambda` or both.
        #[arg(long)]
        mapping: Option<String>,
        /// `unroll`, `table`, `subbox` or `all`.
        #[arg(long)]
        strategy: Option<String>,
        /// Sub-averages x runs, e.g. `100x10`.
        #[arg(long)]
        reps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// key=value file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a PBM/PGM image of the gasket, a coverage map or the block placement.
    Render {
        /// Grid edge as a scale level (n = 2^r).
        #[arg(long, conflicts_with = "n")]
        r: Option<u32>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value = "gasket")]
        mode: String,
        #[arg(long, default_value_t = 8)]
        rho: u64,
        #[arg(long, default_value = "subbox")]
        strategy: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the analytic quantities for a scale level.
    Info {
        #[arg(long)]
        r: u32,
    },
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::parse(s).ok_or_else(|| format!("unknown mutation `{s}`"))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Verify {
            r_max,
            inject_mutation,
        } => {
            let report = commands::verify(r_max, inject_mutation.unwrap_or_default())?;
            println!("{report}");
            Ok(report.passed())
        }
        Command::Bench {
            r,
            rho,
            mapping,
            strategy,
            reps,
            out,
            workers,
            config,
        } => {
            let flags = SweepOverrides {
                r,
                rho,
                mapping,
                strategy,
                reps,
                out,
                workers,
            };
            let file = match &config {
                Some(path) => SweepOverrides::from_map(&read_config_file(path)?)?,
                None => SweepOverrides::default(),
            };
            let cfg = flags.over(file).resolve()?;
            let rows = commands::bench(&cfg, |rec| {
                let label = rec.strategy.map_or("none", |s| s.name());
                match (&rec.metrics, rec.speedup) {
                    (Some(m), sp) => eprintln!(
                        "r={:<2} rho={:<3} {:<6} {:<6} cost={} wall={:.0}ns speedup={}",
                        rec.r,
                        rec.rho,
                        rec.mapping.name(),
                        label,
                        m.simulated_cost,
                        m.wall_ns,
                        sp.map_or("-".into(), |s| format!("{s:.3}"))
                    ),
                    (None, _) => eprintln!(
                        "r={:<2} rho={:<3} {:<6} {:<6} {}",
                        rec.r,
                        rec.rho,
                        rec.mapping.name(),
                        label,
                        rec.status.name()
                    ),
                }
            })?;
            println!("wrote {} rows to {}", rows.len(), cfg.out.display());
            if let Some(best) = commands::best_speedup(&rows) {
                println!(
                    "best measured speedup: {:.3} at r={} rho={} strategy={}",
                    best.speedup.unwrap_or_default(),
                    best.r,
                    best.rho,
                    best.strategy.map_or("none", |s| s.name())
                );
            }
            Ok(true)
        }
        Command::Render {
            r,
            n,
            mode,
            rho,
            strategy,
            out,
        } => {
            let n = match (r, n) {
                (Some(r), _) if r < 64 => 1u64 << r,
                (Some(r), _) => return Err(Error::Config(format!("r = {r} is too large"))),
                (None, Some(n)) => n,
                (None, None) => return Err(Error::Config("render needs --r or --n".into())),
            };
            let mode: RenderMode = mode.parse()?;
            let strategy: IntraStrategy = strategy.parse()?;
            let raster = commands::render(n, mode, rho.min(n), strategy, &out)?;
            let lit = raster.pixels.iter().filter(|&&p| p > 0).count();
            println!(
                "wrote {}x{} image to {} ({lit} non-zero pixels)",
                n,
                n,
                out.display()
            );
            Ok(true)
        }
        Command::Info { r } => {
            println!("{}", commands::info(r)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
