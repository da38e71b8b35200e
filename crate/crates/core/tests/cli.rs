use std::process::Command;

use sierpinski_blockmap::bench::{read_csv, RowStatus, CSV_HEADER};
use sierpinski_blockmap::fractal::member_bits;
use sierpinski_blockmap::render::Raster;
use sierpinski_blockmap::Mapping;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sierpinski-bench"))
}

fn run(args: &[&str]) -> (bool, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn verify_passes() {
    let (ok, stdout, _) = run(&["verify", "--r-max", "0"]);
    assert!(ok, "{stdout}");
    let (ok, stdout, _) = run(&["verify", "--r-max", "10"]);
    assert!(ok, "{stdout}");
    assert!(stdout.contains("59049 cells checked"), "{stdout}");
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn verify_fails_on_injected_mutation() {
    for m in ["x-parity", "y-parity", "divisor", "offset"] {
        let (ok, stdout, _) = run(&["verify", "--r-max", "4", "--inject-mutation", m]);
        assert!(!ok, "{m} passed verify");
        assert!(stdout.contains("first failure: bijection"), "{m}: {stdout}");
        assert!(stdout.contains("witness omega = ("), "{m}: {stdout}");
    }
}

#[test]
fn verify_rejects_large_levels() {
    let (ok, _, stderr) = run(&["verify", "--r-max", "13"]);
    assert!(!ok);
    assert!(stderr.contains("out of range"), "{stderr}");
}

#[test]
fn info_reports() {
    let (ok, stdout, _) = run(&["info", "--r", "4"]);
    assert!(ok);
    assert!(stdout.contains("volume 3^r           81"), "{stdout}");
    assert!(stdout.contains("9x9"));
    let (_, stdout, _) = run(&["info", "--r", "0"]);
    assert!(stdout.contains("volume 3^r           1\n") && stdout.contains("1x1"));
    let (_, stdout, _) = run(&["info", "--r", "16"]);
    assert!(stdout.contains("43046721"));
    let (ok, _, _) = run(&["info", "--r", "41"]);
    assert!(!ok);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let (ok, _, stderr) = run(&[
        "bench",
        "--r",
        "0..6",
        "--rho",
        "1,8",
        "--reps",
        "2x1",
        "--workers",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(ok, "{stderr}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert!(!text.contains('\r'));
    let rows = read_csv(&out).unwrap();
    // 7 levels x 2 block edges x (bb + 3 strategies)
    assert_eq!(rows.len(), 56);
    let shape_skips = rows
        .iter()
        .filter(|r| r.status == RowStatus::SkippedShape)
        .count();
    assert_eq!(shape_skips, 3 * 4);
    let single = rows.iter().find(|r| r.r == 0 && r.rho == 1).unwrap();
    assert_eq!(single.metrics.unwrap().threads_useful, 1);
    let r6: Vec<_> = rows.iter().filter(|r| r.r == 6 && r.rho == 8).collect();
    assert_eq!(r6[0].metrics.unwrap().blocks_launched, 64);
    for row in &r6[1..] {
        assert_eq!(row.mapping, Mapping::Lambda);
        assert_eq!(row.metrics.unwrap().blocks_launched, 27);
        assert!(row.cost_ratio.unwrap() > 1.0);
    }
    assert!(!dir.path().join("sweep.csv.tmp").exists());
}

#[test]
fn bench_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    let out = dir.path().join("from-file.csv");
    std::fs::write(
        &cfg,
        format!("# small sweep\nr = 3\nrho = 2\nmapping = lambda\nstrategy = table\nreps = 1x1\nout = {}\n", out.display()),
    )
    .unwrap();
    let (ok, _, stderr) = run(&["bench", "--config", cfg.to_str().unwrap(), "--rho", "4"]);
    assert!(ok, "{stderr}");
    let rows = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(
        (rows[0].r, rows[0].rho, rows[0].mapping),
        (3, 4, Mapping::Lambda)
    );
    assert!(rows[0].speedup.is_none());
}

#[test]
fn bench_rejects_bad_config() {
    let (ok, _, stderr) = run(&["bench", "--rho", "3", "--r", "2"]);
    assert!(!ok);
    assert!(stderr.contains("power of two"), "{stderr}");
}

#[test]
fn render_modes() {
    let dir = tempfile::tempdir().unwrap();
    let gasket = dir.path().join("g.pbm");
    assert!(
        run(&[
            "render",
            "--n",
            "8",
            "--mode",
            "gasket",
            "--out",
            gasket.to_str().unwrap()
        ])
        .0
    );
    let g = Raster::load(&gasket).unwrap();
    assert_eq!(g.pixels.iter().filter(|&&p| p == 1).count(), 27);

    let one = dir.path().join("one.pbm");
    assert!(run(&["render", "--r", "0", "--out", one.to_str().unwrap()]).0);
    assert_eq!(Raster::load(&one).unwrap().pixels, vec![1]);

    let cov = dir.path().join("cov.pgm");
    assert!(
        run(&[
            "render",
            "--n",
            "64",
            "--mode",
            "coverage",
            "--rho",
            "8",
            "--out",
            cov.to_str().unwrap()
        ])
        .0
    );
    let c = Raster::load(&cov).unwrap();
    for y in 0..64 {
        for x in 0..64 {
            assert_eq!(c.get(x, y), member_bits(x, y, 64) as u16);
        }
    }

    let bm = dir.path().join("bm.pgm");
    assert!(
        run(&[
            "render",
            "--r",
            "5",
            "--mode",
            "blockmap",
            "--rho",
            "4",
            "--out",
            bm.to_str().unwrap()
        ])
        .0
    );
    assert_eq!(Raster::load(&bm).unwrap().maxval, 255);

    let (ok, _, stderr) = run(&["render", "--n", "8", "--out", "/nonexistent-dir/x.pbm"]);
    assert!(!ok);
    assert!(stderr.contains("i/o error"), "{stderr}");
}
