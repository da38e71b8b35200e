//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines print in order:
//! `cargo test -p sierpinski-blockmap --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use sierpinski_blockmap::bench::{run_sweep, RepScheme, SweepConfig};
use sierpinski_blockmap::fractal::{enumerate_cells, hausdorff_exponent, packing_dims, POW3};
use sierpinski_blockmap::intra::strategy_cells;
use sierpinski_blockmap::lambda::{lambda_map, verify_bijection, verify_bijection_with, Mutation};
use sierpinski_blockmap::sim::{
    block_ratio, expected_metrics, launch, predicted_block_ratio, simulated_cost, ConstantWrite,
    Engine,
};
use sierpinski_blockmap::{FractalSpec, Grid, IntraStrategy, LaunchConfig, Mapping, WorkMetrics};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

/// Criterion 1: |enumerate_cells(2^r)| = 3^r for r = 0..=12, under 10 s.
fn volume_law() -> Outcome {
    let start = Instant::now();
    for r in 0..=12u32 {
        let got = enumerate_cells(1 << r).map_err(|e| e.to_string())?.len() as u64;
        ensure(got == POW3[r as usize], || format!("r={r}: {got} cells"))?;
    }
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!("r=0..12 exact, {took:.2?}"))
}

/// Criterion 2: Orthotope area is 3^r and the map's image covers the gasket, r = 0..=12.
fn packing() -> Outcome {
    for r in 0..=12u32 {
        let d = packing_dims(r).map_err(|e| e.to_string())?;
        ensure(d.width * d.height == POW3[r as usize], || {
            format!("r={r}: area {}", d.width * d.height)
        })?;
        let dims: BTreeSet<_> = [d.width, d.height].into();
        let want: BTreeSet<_> = [POW3[(r / 2) as usize], POW3[r.div_ceil(2) as usize]].into();
        ensure(dims == want, || format!("r={r}: dims {dims:?}"))?;
        let rep = verify_bijection(r).map_err(|e| e.to_string())?;
        ensure(rep.misses == 0, || {
            format!("r={r}: {} cells uncovered", rep.misses)
        })?;
    }
    Ok("r=0..12 covered, area = 3^r".into())
}

/// Criterion 3: verify_bijection(r_b) for r_b = 0..=10, zero duplicates and misses, under 5 s.
fn bijection() -> Outcome {
    let start = Instant::now();
    let mut blocks = 0;
    for r_b in 0..=10 {
        let rep = verify_bijection(r_b).map_err(|e| e.to_string())?;
        ensure(
            rep.is_bijection() && rep.duplicates == 0 && rep.misses == 0,
            || format!("{rep:?}"),
        )?;
        blocks = rep.image_size;
    }
    let took = within(Duration::from_secs(5), start)?;
    Ok(format!("r_b=0..10, {blocks} blocks at r_b=10, {took:.2?}"))
}

/// Criterion 4: Every intra-block strategy yields exactly enumerate_cells(rho).
fn strategy_equivalence() -> Outcome {
    for rho in [1u64, 2, 4, 8, 16, 32, 64] {
        let oracle: BTreeSet<_> = enumerate_cells(rho)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        for s in IntraStrategy::ALL {
            let cells = strategy_cells(s, rho).map_err(|e| e.to_string())?;
            let set: BTreeSet<_> = cells.iter().copied().collect();
            ensure(set.len() == cells.len(), || {
                format!("{s} repeats cells at rho={rho}")
            })?;
            ensure(set == oracle, || {
                format!("{s} differs from oracle at rho={rho}")
            })?;
        }
    }
    Ok("rho=1..64, 3 strategies identical".into())
}

struct LaunchRecord {
    spec: FractalSpec,
    mapping: Mapping,
    strategy: Option<IntraStrategy>,
    metrics: WorkMetrics,
}

/// Criterion 5: constant-write grids agree between the bounding box and every lambda
/// strategy, with exactly 3^r cells set; under 2 minutes.
fn end_to_end(records: &mut Vec<LaunchRecord>) -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for r in 1..=12u32 {
        let n = 1u64 << r;
        for rho in [1u64, 2, 4, 8, 16, 32].into_iter().filter(|&rho| rho <= n) {
            let spec = FractalSpec::new(n, rho).map_err(|e| e.to_string())?;
            let mut bb = Grid::new(n).map_err(|e| e.to_string())?;
            let cfg = LaunchConfig::bounding_box(spec);
            let m = launch(&cfg, &ConstantWrite(1), &mut bb).map_err(|e| e.to_string())?;
            records.push(LaunchRecord {
                spec,
                mapping: Mapping::BoundingBox,
                strategy: None,
                metrics: m,
            });
            let set = bb.count_nonzero();
            ensure(set == POW3[r as usize], || {
                format!("bb n={n} rho={rho}: {set} cells set")
            })?;
            for s in IntraStrategy::ALL {
                let mut grid = Grid::new(n).map_err(|e| e.to_string())?;
                let cfg = LaunchConfig::lambda(spec, s);
                let m = launch(&cfg, &ConstantWrite(1), &mut grid).map_err(|e| e.to_string())?;
                records.push(LaunchRecord {
                    spec,
                    mapping: Mapping::Lambda,
                    strategy: Some(s),
                    metrics: m,
                });
                ensure(grid == bb, || {
                    format!("{s} grid differs from bb at n={n} rho={rho}")
                })?;
                cases += 1;
            }
        }
    }
    let took = within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{cases} (n, rho, strategy) cases bit-identical, {took:.2?}"
    ))
}

/// Criterion 6: Block and thread counts, and the n_b^(2-H) block ratio to 1e-9.
fn work_counts(records: &[LaunchRecord]) -> Outcome {
    ensure(!records.is_empty(), || "no launches recorded".into())?;
    let mut worst = 0f64;
    // launches are recorded bb first, then each lambda strategy for the same spec
    let mut bb_blocks = 0;
    for rec in records {
        let s = &rec.spec;
        let m = &rec.metrics;
        let want = expected_metrics(s, rec.mapping, rec.strategy).map_err(|e| e.to_string())?;
        ensure(m.same_work(&want), || {
            format!(
                "n={} rho={} {:?}: {m:?} vs {want:?}",
                s.n(),
                s.rho(),
                rec.strategy
            )
        })?;
        ensure(m.threads_useful == POW3[s.r() as usize], || {
            "useful threads != 3^r".into()
        })?;
        match rec.mapping {
            Mapping::BoundingBox => ensure(m.blocks_launched == s.n_b() * s.n_b(), || {
                "bb blocks != n_b^2".into()
            })?,
            Mapping::Lambda => {
                ensure(m.blocks_launched == POW3[s.r_b() as usize], || {
                    "lambda blocks != 3^r_b".into()
                })?;
                if rec.strategy == Some(IntraStrategy::FurtherUnrolling) {
                    ensure(m.threads_launched == POW3[s.r() as usize], || {
                        format!("unroll threads {} != 3^{}", m.threads_launched, s.r())
                    })?;
                    let power = (s.n() as f64).powf(hausdorff_exponent());
                    ensure(
                        (m.threads_launched as f64 - power).abs() <= 1e-9 * power,
                        || "unroll threads != n^log2(3)".into(),
                    )?;
                }
            }
        }
        if rec.mapping == Mapping::BoundingBox {
            bb_blocks = m.blocks_launched;
            continue;
        }
        let measured = bb_blocks as f64 / m.blocks_launched as f64;
        ensure(measured == block_ratio(s), || {
            "measured block ratio disagrees with the model".into()
        })?;
        let law = predicted_block_ratio(s.n_b());
        let rel = (measured - law).abs() / law;
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || {
            format!("n_b={}: ratio {measured} vs {law}", s.n_b())
        })?;
    }
    Ok(format!(
        "{} launches, max relative ratio error {worst:.1e}",
        records.len()
    ))
}

/// Criterion 7: reduction_depth = ceil(log2(max(r_b, 1))), +1 per doubling of r_b.
fn depth(records: &[LaunchRecord]) -> Outcome {
    let expected = |r_b: u32| (r_b.max(1) as f64).log2().ceil() as u32;
    for r_b in 0..=16 {
        let d = lambda_map(Default::default(), r_b)
            .map_err(|e| e.to_string())?
            .depth;
        ensure(d == expected(r_b), || format!("r_b={r_b}: depth {d}"))?;
    }
    for r_b in 1..=8 {
        let a = lambda_map(Default::default(), r_b).unwrap().depth;
        let b = lambda_map(Default::default(), 2 * r_b).unwrap().depth;
        ensure(b == a + 1, || {
            format!("depth({}) = {b}, depth({r_b}) = {a}", 2 * r_b)
        })?;
    }
    for rec in records.iter().filter(|r| r.mapping == Mapping::Lambda) {
        let r_b = rec.spec.r_b();
        ensure(rec.metrics.reduction_depth == expected(r_b), || {
            format!("launch at r_b={r_b}")
        })?;
    }
    Ok("r_b=0..16 and all recorded launches".into())
}

/// Criterion 8: Cost ratio at rho = 16 strictly increasing for n = 2^8..2^13 and > 1.
fn cost_monotone() -> Outcome {
    let mut summary = Vec::new();
    for s in IntraStrategy::ALL {
        let mut prev: Option<(u128, u128)> = None;
        for r in 8..=13 {
            let spec = FractalSpec::from_levels(r, 16).map_err(|e| e.to_string())?;
            let bb = simulated_cost(&spec, Mapping::BoundingBox, None).map_err(|e| e.to_string())?
                as u128;
            let lm =
                simulated_cost(&spec, Mapping::Lambda, Some(s)).map_err(|e| e.to_string())? as u128;
            ensure(bb > lm, || format!("{s} r={r}: ratio {bb}/{lm} <= 1"))?;
            if let Some((pb, pl)) = prev {
                // bb/lm > pb/pl in exact integers
                ensure(bb * pl > pb * lm, || format!("{s} r={r}: not increasing"))?;
            }
            prev = Some((bb, lm));
        }
        let (bb, lm) = prev.unwrap();
        summary.push(format!("{s} {:.2}", bb as f64 / lm as f64));
    }
    Ok(format!("ratio at n=2^13: {}", summary.join(", ")))
}

/// Criterion 9: wall-clock speedup of lambda/subbox over bb at n = 2^12, rho = 16.
/// Reported, not asserted.
fn wall_clock() -> String {
    let cfg = SweepConfig {
        r_min: 12,
        r_max: 12,
        rho_set: vec![16],
        strategies: vec![IntraStrategy::BoundingSubBox],
        reps: RepScheme {
            sub_averages: 5,
            runs_per_sub: 2,
        },
        ..SweepConfig::default()
    };
    let engine = match Engine::new(0) {
        Ok(e) => e,
        Err(e) => return format!("could not start engine: {e}"),
    };
    match run_sweep(&cfg, &engine) {
        Ok(rows) => match rows
            .iter()
            .find_map(|r| r.speedup.filter(|_| r.mapping == Mapping::Lambda))
        {
            Some(sp) => format!(
                "speedup {sp:.3} on {} worker(s) ({})",
                engine.workers(),
                if sp >= 1.0 { ">= 1" } else { "< 1" }
            ),
            None => "no speedup measured".into(),
        },
        Err(e) => format!("sweep failed: {e}"),
    }
}

/// Criterion 10: Each corrupted term makes the bijection check fail with a witness.
fn mutation_sensitivity() -> Outcome {
    let mut caught = Vec::new();
    for m in Mutation::ALL {
        let mut found = None;
        for r_b in 0..=10 {
            let rep = verify_bijection_with(r_b, m).map_err(|e| e.to_string())?;
            if !rep.is_bijection() {
                found = Some((r_b, rep.witness));
                break;
            }
        }
        match found {
            Some((r_b, Some(w))) => caught.push(format!("{} @r_b={r_b} {w}", m.name())),
            Some((r_b, None)) => {
                return Err(format!(
                    "{} failed at r_b={r_b} without a witness",
                    m.name()
                ))
            }
            None => return Err(format!("{} was not detected", m.name())),
        }
    }
    Ok(caught.join("; "))
}

fn main() -> ExitCode {
    let mut records = Vec::new();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("[PASS] {id:>2} {name:<24} {detail}"),
        Err(detail) => {
            failed += 1;
            println!("[FAIL] {id:>2} {name:<24} {detail}");
        }
    };

    report(1, "volume law", volume_law());
    report(2, "packing", packing());
    report(3, "bijection", bijection());
    report(4, "strategy equivalence", strategy_equivalence());
    let e2e = end_to_end(&mut records);
    report(5, "end-to-end equality", e2e);
    report(6, "work counts", work_counts(&records));
    report(7, "reduction depth", depth(&records));
    report(8, "cost-ratio growth", cost_monotone());
    println!(
        "[SOFT] {:>2} {:<24} {}",
        9,
        "wall-clock speedup",
        wall_clock()
    );
    report(10, "mutation sensitivity", mutation_sensitivity());

    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
