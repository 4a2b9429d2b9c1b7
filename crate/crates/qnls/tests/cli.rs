//! End-to-end tests of the command-line interface, driven in process
//! through `main_with_args`: artifact layout, manifest hashing, exit-code
//! contract, and byte-level determinism under a fixed seed.

use std::fs;
use std::path::Path;

use qnls::checkpoint::read_checkpoint;
use qnls::cli::main_with_args;
use qnls::scenario::RunRecord;

fn scenario_toml() -> &'static str {
    r#"
model = "toy-quadratic"
dim = 1
diagnostics = ["mass", "sobolev:3"]

[grid]
points = 64
half_width = 62.8318530717958648

[initial]
family = "gaussian"
amplitude = 1e-3
sigma = 2.0

[solver]
dt = 2e-3
t_end = 0.02
checkpoint_stride = 5
"#
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("qnls").chain(args.iter().copied()))
}

fn write_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, scenario_toml()).unwrap();
    path
}

#[test]
fn simulate_produces_manifest_checkpoint_and_series() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let out = tmp.path().join("run");
    let code = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "7",
        "simulate",
    ]);
    assert_eq!(code, 0);
    for name in ["run.json", "series.csv", "series.ndjson", "state_final.qnls", "scenario.toml"] {
        assert!(out.join(name).exists(), "missing artifact {name}");
    }
    let record = RunRecord::read_json(&out.join("run.json")).unwrap();
    assert_eq!(record.seed, 7);
    assert!(!record.artifacts.is_empty());
    let ckpt = read_checkpoint(&out.join("state_final.qnls")).unwrap();
    assert!((ckpt.sim_time - 0.02).abs() < 2e-3);
    assert!(ckpt.field.is_finite());
    // The CSV has a time column plus the requested channels.
    let head = fs::read_to_string(out.join("series.csv")).unwrap();
    let header = head.lines().next().unwrap();
    assert!(header.starts_with("time"));
    assert!(header.contains("mass"));
    assert!(header.contains("sobolev"));
}

#[test]
fn simulate_is_byte_deterministic_under_fixed_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let mut runs = Vec::new();
    for sub in ["a", "b"] {
        let out = tmp.path().join(sub);
        let code = run(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "11",
            "simulate",
        ]);
        assert_eq!(code, 0);
        runs.push((
            fs::read(out.join("series.csv")).unwrap(),
            read_checkpoint(&out.join("state_final.qnls")).unwrap(),
        ));
    }
    assert_eq!(runs[0].0, runs[1].0, "series.csv differs between identical runs");
    // The checkpoint payload (state and simulation time) is bit-identical;
    // only the recorded wall-clock metadata may differ between runs.
    assert_eq!(runs[0].1.sim_time.to_bits(), runs[1].1.sim_time.to_bits());
    for (a, b) in runs[0].1.field.components().iter().zip(runs[1].1.field.components()) {
        assert_eq!(
            a.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>(),
            b.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>(),
            "final state differs between identical runs"
        );
    }
}

#[test]
fn report_verifies_hashes_and_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(
        run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "simulate"]),
        0
    );
    assert_eq!(run(&["report", out.to_str().unwrap()]), 0);
    // Flip a byte in an exported artifact: the manifest hash must catch it.
    let series = out.join("series.csv");
    let mut data = fs::read(&series).unwrap();
    let last = data.len() - 2;
    data[last] = data[last].wrapping_add(1);
    fs::write(&series, data).unwrap();
    assert_eq!(run(&["report", out.to_str().unwrap()]), 4);
}

#[test]
fn config_errors_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    // Missing config.
    assert_eq!(run(&["simulate"]), 2);
    // Malformed TOML.
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "model = [unclosed").unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "simulate"]), 2);
    // Structurally invalid scenario (negative dt).
    let invalid = tmp.path().join("invalid.toml");
    fs::write(&invalid, scenario_toml().replace("dt = 2e-3", "dt = -1.0")).unwrap();
    assert_eq!(run(&["--config", invalid.to_str().unwrap(), "simulate"]), 2);
    // Unknown verb is a usage error.
    assert_eq!(run(&["frobnicate"]), 2);
}

#[test]
fn converge_requires_at_least_two_halvings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let out = tmp.path().join("c");
    let code = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "converge",
        "--halvings",
        "1",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn converge_writes_cauchy_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let out = tmp.path().join("c");
    let code = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "converge",
        "--halvings",
        "2",
        "--epsilon",
        "1e-3",
    ]);
    assert_eq!(code, 0);
    let table = fs::read_to_string(out.join("converge.csv")).unwrap();
    // Header plus one distance row per consecutive viscosity pair.
    assert_eq!(table.lines().count(), 1 + 2);
}

#[test]
fn verify_lemmas_runs_selected_suites_and_rejects_unknown_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let code = run(&[
        "--out",
        out.to_str().unwrap(),
        "verify-lemmas",
        "--samples",
        "5",
        "--suite",
        "identities",
    ]);
    assert_eq!(code, 0);
    let ndjson = fs::read_to_string(out.join("lemmas.ndjson")).unwrap();
    assert!(ndjson.lines().count() >= 1);
    assert!(ndjson.contains("max_ratio"));

    let bad = run(&[
        "--out",
        out.to_str().unwrap(),
        "verify-lemmas",
        "--samples",
        "5",
        "--suite",
        "no-such-suite",
    ]);
    assert_eq!(bad, 2);
}

#[test]
fn diff_run_reports_bounded_growth() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let out = tmp.path().join("d");
    let code = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "diff-run",
        "--perturbation",
        "1e-6",
    ]);
    assert_eq!(code, 0);
    let diff = fs::read_to_string(out.join("diff.csv")).unwrap();
    assert!(diff.lines().count() > 1);
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["simulate", "--help"]), 0);
}
