//! End-to-end checks of the binary: exit codes, JSON shape, unit flags,
//! and byte-stable sweep output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relaymesh"))
}

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("the binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn strategy_rate(report: &serde_json::Value, tag: &str) -> f64 {
    report["results"]
        .as_array()
        .expect("results array")
        .iter()
        .find(|r| r["strategy"] == tag)
        .unwrap_or_else(|| panic!("no `{tag}` entry in {report:#}"))["rate"]
        .as_f64()
        .expect("rate is a number")
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

#[test]
fn rate_reproduces_the_unit_network_anchor() {
    let out = run(&["rate", "--config", sample("unit-t3.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["rate_unit"], "bits");
    assert_eq!(report["units"], "linear");
    let cf = strategy_rate(&report, "compress_forward");
    assert!(
        (cf - 0.5849625007211562).abs() < 1e-12,
        "unit-network compress-forward rate should be 0.58496..., got {cf}"
    );
    // all six strategies by default on a three-node network
    assert_eq!(report["results"].as_array().unwrap().len(), 6);
}

#[test]
fn rate_covers_larger_networks_with_the_generic_strategies() {
    let out = run(&[
        "rate",
        "--config",
        sample("t4-two-relays.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let tags: Vec<&str> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["strategy"].as_str().unwrap())
        .collect();
    assert_eq!(tags, ["compress_forward_general", "broadcast_cut"]);
    let cf = strategy_rate(&report, "compress_forward_general");
    let cap = strategy_rate(&report, "broadcast_cut");
    assert!(cf > 0.0 && cf <= cap, "0 < {cf} <= {cap} expected");
}

#[test]
fn rate_scales_into_nats_on_request() {
    let config = sample("unit-t3.json");
    let bits = stdout_json(&run(&["rate", "--config", config.to_str().unwrap()]));
    let nats = stdout_json(&run(&[
        "rate",
        "--config",
        config.to_str().unwrap(),
        "--log-base",
        "e",
    ]));
    assert_eq!(nats["rate_unit"], "nats");
    let scale = std::f64::consts::LN_2;
    for tag in ["cut_set", "compress_forward", "multihop_tdma"] {
        let b = strategy_rate(&bits, tag);
        let n = strategy_rate(&nats, tag);
        assert!(
            (n - b * scale).abs() < 1e-12,
            "{tag}: {n} nats vs {b} bits"
        );
    }
}

#[test]
fn db_inputs_match_their_linear_equivalents() {
    let dir = tempfile::tempdir().unwrap();
    let db_config = dir.path().join("unit-db.json");
    // 0 dB everywhere is the all-ones network
    std::fs::write(
        &db_config,
        r#"{
            "T": 3,
            "powers": [0.0, 0.0],
            "noises": [0.0, 0.0],
            "gains": [[0.0, 1.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]
        }"#,
    )
    .unwrap();
    let db = stdout_json(&run(&[
        "rate",
        "--config",
        db_config.to_str().unwrap(),
        "--db",
    ]));
    let linear = stdout_json(&run(&[
        "rate",
        "--config",
        sample("unit-t3.json").to_str().unwrap(),
    ]));
    assert_eq!(db["units"], "db");
    for tag in ["cut_set", "decode_forward", "compress_forward"] {
        assert_eq!(
            strategy_rate(&db, tag),
            strategy_rate(&linear, tag),
            "{tag} must not depend on the input unit system"
        );
    }
    // echoed powers come back in the input's unit system
    assert_eq!(db["powers"][0], 0.0);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let config = sample("line-spl-sweep.json");
    for out_path in [&a, &b] {
        let out = run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let (first, second) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!first.is_empty());
    assert_eq!(first, second, "sweep runs must serialize identically");

    let text = String::from_utf8(first).unwrap();
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("column header after comments");
    assert_eq!(
        header,
        "swept,R_CS,R_DF,R_CF,R_MH,gap_DF,gap_CF,gap_MH,log10_gap_DF,log10_gap_CF,log10_gap_MH"
    );
}

#[test]
fn sweep_writes_plot_files_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let out = run(&[
        "sweep",
        "--config",
        sample("line-spl-sweep.json").to_str().unwrap(),
        "--out",
        dir.path().join("sweep.csv").to_str().unwrap(),
        "--plot-dir",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    for name in ["CS.dat", "DF.dat", "CF.dat", "MH.dat", "gap_DF.dat", "gap_CF.dat"] {
        let path = plots.join(name);
        assert!(path.is_file(), "missing plot file {name}");
        assert!(std::fs::metadata(&path).unwrap().len() > 0);
    }
    assert!(
        !plots.join("gap_CS.dat").exists(),
        "the gap reference has no gap file"
    );
}

#[test]
fn sweep_without_a_sweep_block_is_a_validation_error() {
    let out = run(&[
        "sweep",
        "--config",
        sample("unit-t3.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));
}

// ---------------------------------------------------------------------------
// probe / verify / threshold
// ---------------------------------------------------------------------------

#[test]
fn probe_classifies_the_near_destination_case() {
    let out = run(&["probe", "--case", "6"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let verdicts = stdout_json(&out);
    let verdicts = verdicts.as_array().expect("array of verdicts");
    assert_eq!(verdicts.len(), 2);
    assert_eq!(verdicts[0]["strategy"], "decode_forward");
    assert_eq!(verdicts[0]["verdict"], "bounded_away");
    assert_eq!(verdicts[1]["strategy"], "compress_forward");
    assert_eq!(verdicts[1]["verdict"], "approaches");
}

#[test]
fn probe_runs_every_case_by_default() {
    let out = run(&["probe"]);
    assert_eq!(code(&out), 0);
    let verdicts = stdout_json(&out);
    assert_eq!(
        verdicts.as_array().unwrap().len(),
        20,
        "ten cases, two strategies each"
    );
}

#[test]
fn verify_passes_on_the_documented_seed() {
    let out = run(&["verify", "--draws", "200", "--seed", "7"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.starts_with("# generator: ChaCha8  seed: 7  draws: 200"),
        "header names the generator: {text}"
    );
    assert!(text.contains("4/4 suites passed"), "summary line: {text}");
}

#[test]
fn threshold_brackets_the_crossing_power() {
    let out = run(&[
        "threshold",
        "--config",
        sample("mpl-line.json").to_str().unwrap(),
        "--d23",
        "0.05",
        "--target",
        "0.97",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let p2 = report["p2"].as_f64().unwrap();
    assert!(
        (5.0..50.0).contains(&p2),
        "a nearby relay needs tens of units of power, got {p2}"
    );
}

// ---------------------------------------------------------------------------
// failure modes
// ---------------------------------------------------------------------------

#[test]
fn unknown_flags_exit_with_one() {
    let out = run(&["rate", "--no-such-flag"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn a_missing_subcommand_exits_with_one() {
    let out = run(&[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn malformed_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"T\": 3,").unwrap();
    let out = run(&["rate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn invalid_network_parameters_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("negative-power.json");
    std::fs::write(
        &path,
        r#"{
            "T": 3,
            "powers": [-1.0, 1.0],
            "noises": [1.0, 1.0],
            "gains": [[0.0, 1.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]
        }"#,
    )
    .unwrap();
    let out = run(&["rate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn help_is_not_an_error() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["rate", "--help"])), 0);
}
