use std::path::Path;

use grandlab::cli::{run, EXIT_IO, EXIT_OK, EXIT_USAGE};
use grandlab::pattern::load_schedule;
use grandlab::reshuffle::load_model;
use grandlab::sim::read_sweep_csv;

fn grandlab(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("grandlab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(grandlab(&[]).0, EXIT_USAGE);
    assert_eq!(grandlab(&["schedule", "build", "--weight", "bogus", "--n", "8", "--out", "x"]).0, EXIT_USAGE);
    assert_eq!(grandlab(&["schedule", "build", "--weight", "rank", "--n", "4", "--count", "17", "--out", "x"]).0, EXIT_USAGE);
    assert_eq!(grandlab(&["schedule", "build", "--weight", "cdf", "--n", "8", "--out", "x"]).0, EXIT_USAGE);
}

#[test]
fn missing_files_exit_3() {
    let (code, _) = grandlab(&[
        "reshuffle", "train", "--base", "/nonexistent/base.sched", "--sigma", "0.7", "--samples", "10", "--seed", "1",
        "--out", "/tmp/never.model",
    ]);
    assert_eq!(code, EXIT_IO);
    assert_eq!(grandlab(&["sim", "bler", "--config", "/nonexistent/x.cfg"]).0, EXIT_IO);
}

#[test]
fn schedule_build_writes_loadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rank.sched");
    let (code, _) = grandlab(&["schedule", "build", "--weight", "rank", "--n", "127", "--count", "500", "--out", p(&out)]);
    assert_eq!(code, EXIT_OK);
    let s = load_schedule(&out).unwrap();
    assert_eq!((s.n(), s.len(), s.tag()), (127, 500, "rank"));

    let cdf = dir.path().join("cdf.sched");
    let args = ["schedule", "build", "--weight", "cdf", "--n", "32", "--count", "300", "--sigma", "0.7", "--samples", "10000", "--out", p(&cdf)];
    assert_eq!(grandlab(&args).0, EXIT_OK);
    let first = std::fs::read(&cdf).unwrap();
    assert_eq!(grandlab(&args).0, EXIT_OK);
    assert_eq!(std::fs::read(&cdf).unwrap(), first);
}

#[test]
fn reshuffle_train_is_deterministic_and_rejects_zero_samples() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.sched");
    assert_eq!(
        grandlab(&["schedule", "build", "--weight", "rank", "--n", "64", "--count", "400", "--out", p(&base)]).0,
        EXIT_OK
    );
    let train = |out: &Path, samples: &str| {
        grandlab(&[
            "reshuffle", "train", "--base", p(&base), "--sigma", "0.7", "--samples", samples, "--seed", "9",
            "--heldout", "50", "--out", p(out),
        ])
    };
    let a = dir.path().join("a.model");
    let b = dir.path().join("b.model");
    assert_eq!(train(&a, "300").0, EXIT_OK);
    assert_eq!(train(&b, "300").0, EXIT_OK);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let m = load_model(&a).unwrap();
    assert_eq!(m.len(), 400);
    assert!(m.reshuffled().patterns()[0].is_empty());

    assert_eq!(train(&dir.path().join("c.model"), "0").0, EXIT_USAGE);

    let prefix = dir.path().join("r");
    let (code, _) = grandlab(&["analyze", "rmatrix", "--model", p(&a), "--k", "20", "--out", p(&prefix)]);
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 20);
    let pgm = std::fs::read(dir.path().join("r.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n"));
    assert!(dir.path().join("r_base.csv").exists());
}

#[test]
fn sim_bler_writes_sweep_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "code = hamming74\ndecoders = sgrand\nsnr_db = 2,4\nmax_trials = 300\nmin_block_errors = 1000\n").unwrap();
    let out = dir.path().join("sweep.csv");
    let (code, _) = grandlab(&["sim", "bler", "--config", p(&cfg), "--set", "truncation=16", "--seed", "5", "--out", p(&out)]);
    assert_eq!(code, EXIT_OK);
    let rows = read_sweep_csv(std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(dir.path().join("sweep.manifest.json").exists());

    let (code, _) = grandlab(&["sim", "bler", "--config", p(&cfg), "--set", "nonsense=1"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn oracle_verify_quick_passes() {
    let (code, text) = grandlab(&["oracle", "verify", "--quick"]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(text.contains("ml_equivalence"));
}
