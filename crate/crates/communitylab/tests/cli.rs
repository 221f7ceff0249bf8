//! End-to-end tests of the `communitylab` binary: exit codes, output
//! files, manifests, determinism, and error reporting.

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_communitylab"));
    // A fixed budget keeps every test deterministic regardless of the
    // caller's environment; individual tests override it.
    cmd.env("COMMUNITYLAB_BUDGET", "100000000");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary failed to spawn")
}

fn assert_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const ONE_CLAUSE: &str = "p cnf 3 1\n1 2 3 0\n";

/// Conflicting projections: both edges constrain the same column vertex
/// to different symbols, so no total labeling satisfies both.
const CONFLICT_LC: &str = "labelcover 2 1 1 2 2\n0 0 0\n1 0 1\n";

const DECISION_FLAGS: [&str; 16] = [
    "--field", "2", "--gridsize", "2", "--fa", "0", "--fb", "1", "--t", "1", "--quotaA", "1",
    "--quotaB", "0", "--aux-h", "2",
];

#[test]
fn pipeline_counts_one_clause_satisfying_assignments() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, ONE_CLAUSE).unwrap();
    let out = run(bin()
        .arg("pipeline")
        .args(["--reduction", "counting", "--analysis", "count"])
        .arg("--cnf")
        .arg(&cnf)
        .arg("--out-dir")
        .arg(dir.path()));
    let stdout = assert_ok(&out);
    assert!(stdout.contains("count = 7"), "stdout: {}", stdout);
    assert!(dir.path().join("pipeline.cgraph").exists());
    let report = read_json(&dir.path().join("pipeline.report.json"));
    assert_eq!(report["result"]["count"], 7);
    assert_eq!(report["result"]["analysis"], "count");
    let manifest = read_json(&dir.path().join("pipeline.manifest.json"));
    assert_eq!(manifest["subcommand"], "pipeline");
    assert!(manifest["outputs"].as_array().unwrap().len() >= 2);
}

#[test]
fn enumerate_then_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, ONE_CLAUSE).unwrap();
    assert_ok(&run(bin()
        .arg("pipeline")
        .args(["--reduction", "counting", "--analysis", "count"])
        .arg("--cnf")
        .arg(&cnf)
        .arg("--out-dir")
        .arg(dir.path())));
    let graph = dir.path().join("pipeline.cgraph");
    let comms = dir.path().join("communities.jsonl");
    assert_ok(&run(bin()
        .arg("enumerate")
        .arg("--graph")
        .arg(&graph)
        .args(["--alpha", "1", "--beta", "1/2", "--min-size", "2"])
        .arg("--out")
        .arg(&comms)));
    let lines: Vec<String> = fs::read_to_string(&comms)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(lines.len(), 7, "one community per satisfying assignment");
    // An enumerate record doubles as a community file: verify ignores
    // the profile fields and reads the counts.
    let community = dir.path().join("community.json");
    fs::write(&community, &lines[0]).unwrap();
    let out = run(bin()
        .current_dir(dir.path())
        .arg("verify")
        .arg("--graph")
        .arg(&graph)
        .arg("--community")
        .arg(&community)
        .args(["--alpha", "1", "--beta", "1/2"]));
    let stdout = assert_ok(&out);
    assert!(stdout.starts_with("PASS"), "stdout: {}", stdout);
    assert!(
        dir.path().join("verify.manifest.json").exists(),
        "stdout-mode runs drop their manifest in the working directory"
    );
}

#[test]
fn verify_reports_fail_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.cgraph");
    assert_ok(&run(bin()
        .arg("gen")
        .arg("planted-community")
        .args(["--n", "20", "--background", "1/4", "--plant-size", "5", "--seed", "3"])
        .arg("--out")
        .arg(&graph)));
    // The whole vertex set: alpha* = 1 would require a complete graph.
    let community = dir.path().join("all.json");
    fs::write(&community, "{\"counts\": [1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1]}\n").unwrap();
    let report_path = dir.path().join("verdict.json");
    let out = run(bin()
        .arg("verify")
        .arg("--graph")
        .arg(&graph)
        .arg("--community")
        .arg(&community)
        .args(["--alpha", "1", "--beta", "1"])
        .arg("--out")
        .arg(&report_path));
    let stdout = assert_ok(&out);
    assert!(
        stdout.starts_with("FAIL"),
        "a failed check is a result, not an error: {}",
        stdout
    );
    let report = read_json(&report_path);
    assert_eq!(report["pass"], false);
}

#[test]
fn malformed_dimacs_fails_with_line_number_and_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("bad.cnf");
    fs::write(&cnf, "p cnf 3 1\n1 bogus 3 0\n").unwrap();
    let out = run(bin()
        .arg("pipeline")
        .args(["--reduction", "counting", "--analysis", "count"])
        .arg("--cnf")
        .arg(&cnf)
        .arg("--out-dir")
        .arg(dir.path()));
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {}", stderr);
    assert!(stderr.contains("parse"), "stderr: {}", stderr);
    assert!(
        !dir.path().join("pipeline.cgraph").exists(),
        "failed runs must not leave partial outputs"
    );
    assert!(
        !dir.path().join("pipeline.manifest.json").exists(),
        "failed runs must not write a manifest"
    );
}

#[test]
fn generation_and_reduction_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let gen_lc = |name: &str| -> PathBuf {
        let path = dir.path().join(name);
        assert_ok(&run(bin()
            .arg("gen")
            .arg("random-biregular-lc")
            .args([
                "--n-a", "2", "--n-b", "2", "--d-a", "1", "--d-b", "1", "--sigma-a", "2",
                "--sigma-b", "2", "--seed", "11",
            ])
            .arg("--out")
            .arg(&path)));
        path
    };
    let lc1 = gen_lc("a.lc");
    let lc2 = gen_lc("b.lc");
    assert_eq!(fs::read(&lc1).unwrap(), fs::read(&lc2).unwrap());

    let reduce = |name: &str| -> PathBuf {
        let path = dir.path().join(name);
        assert_ok(&run(bin()
            .arg("reduce")
            .arg("counting")
            .arg("--labelcover")
            .arg(&lc1)
            .args(["--field", "7", "--gridsize", "2", "--mult", "2"])
            .arg("--out")
            .arg(&path)));
        path
    };
    let g1 = reduce("a.cgraph");
    let g2 = reduce("b.cgraph");
    assert_eq!(fs::read(&g1).unwrap(), fs::read(&g2).unwrap());

    let gen_cnf = |name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        assert_ok(&run(bin()
            .arg("gen")
            .arg("random-3sat")
            .args(["--vars", "3", "--clauses", "1", "--seed", "5"])
            .arg("--out")
            .arg(&path)));
        fs::read(&path).unwrap()
    };
    assert_eq!(gen_cnf("a.cnf"), gen_cnf("b.cnf"));
}

#[test]
fn planted_gen_writes_sidecar_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.cgraph");
    assert_ok(&run(bin()
        .arg("gen")
        .arg("planted-community")
        .args(["--n", "30", "--background", "1/10", "--plant-size", "6", "--seed", "1"])
        .arg("--out")
        .arg(&graph)));
    assert!(graph.exists());
    let sidecar = read_json(&dir.path().join("g.cgraph.plant.json"));
    let plant = sidecar["plant"].as_array().unwrap();
    assert_eq!(plant.len(), 6);
    let manifest = read_json(&dir.path().join("g.cgraph.manifest.json"));
    assert_eq!(manifest["subcommand"], "gen planted-community");
    assert_eq!(manifest["seed"], 1);
    let outputs: Vec<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["path"].as_str().unwrap().to_string())
        .collect();
    assert!(outputs.iter().any(|p| p.ends_with("g.cgraph")));
    assert!(outputs.iter().any(|p| p.ends_with("g.cgraph.plant.json")));
}

#[test]
fn edge_oracle_matches_explicit_graph() {
    let dir = tempfile::tempdir().unwrap();
    let lc = dir.path().join("conflict.lc");
    fs::write(&lc, CONFLICT_LC).unwrap();
    let graph = dir.path().join("g.cgraph");
    assert_ok(&run(bin()
        .arg("reduce")
        .arg("decision")
        .arg("--labelcover")
        .arg(&lc)
        .args(DECISION_FLAGS)
        .args(["--aux-cap", "2", "--mode", "explicit"])
        .arg("--out")
        .arg(&graph)));
    // 8 proper vertices (one balanced subset, 2^3 assignment tables) and
    // one aux pair.
    let groups = 9;
    for v1 in 0..groups {
        for v2 in (v1 + 1)..groups {
            let explicit = assert_ok(&run(bin()
                .current_dir(dir.path())
                .args(["edge", &v1.to_string(), &v2.to_string()])
                .arg("--graph")
                .arg(&graph)));
            let oracle = assert_ok(&run(bin()
                .current_dir(dir.path())
                .args(["edge", &v1.to_string(), &v2.to_string()])
                .arg("--labelcover")
                .arg(&lc)
                .args(DECISION_FLAGS)
                .args(["--aux-cap", "2"])));
            assert_eq!(
                explicit, oracle,
                "adjacency answers diverge at pair ({}, {})",
                v1, v2
            );
        }
    }
}

#[test]
fn oracle_mode_refuses_a_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let lc = dir.path().join("conflict.lc");
    fs::write(&lc, CONFLICT_LC).unwrap();
    let out = run(bin()
        .arg("reduce")
        .arg("decision")
        .arg("--labelcover")
        .arg(&lc)
        .args(DECISION_FLAGS)
        .args(["--mode", "oracle"])
        .arg("--out")
        .arg(dir.path().join("g.cgraph")));
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no file form"), "stderr: {}", stderr);
}

#[test]
fn over_budget_builds_refuse_and_name_the_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let lc = dir.path().join("conflict.lc");
    fs::write(&lc, CONFLICT_LC).unwrap();
    let out = run(bin()
        .env("COMMUNITYLAB_BUDGET", "1000")
        .arg("reduce")
        .arg("decision")
        .arg("--labelcover")
        .arg(&lc)
        .args([
            "--field", "7", "--gridsize", "4", "--fa", "0", "--fb", "1", "--t", "2",
            "--quotaA", "1", "--quotaB", "1", "--aux-h", "3", "--mode", "explicit",
        ])
        .arg("--out")
        .arg(dir.path().join("g.cgraph")));
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("COMMUNITYLAB_BUDGET"),
        "refusal must say how to raise the limit: {}",
        stderr
    );
    assert!(!dir.path().join("g.cgraph").exists());
}

#[test]
fn failed_rerun_keeps_previous_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, ONE_CLAUSE).unwrap();
    let pipeline = |cnf_path: &Path| {
        run(bin()
            .arg("pipeline")
            .args(["--reduction", "counting", "--analysis", "count"])
            .arg("--cnf")
            .arg(cnf_path)
            .arg("--out-dir")
            .arg(dir.path()))
    };
    assert_ok(&pipeline(&cnf));
    let manifest_path = dir.path().join("pipeline.manifest.json");
    let before = fs::read(&manifest_path).unwrap();
    let bad = dir.path().join("bad.cnf");
    fs::write(&bad, "p cnf 3 1\n1 bogus 3 0\n").unwrap();
    assert!(!pipeline(&bad).status.success());
    assert_eq!(
        fs::read(&manifest_path).unwrap(),
        before,
        "a failed rerun must not clobber the previous manifest"
    );
}
