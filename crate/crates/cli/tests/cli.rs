use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn matcons(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matcons"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with(sub: &str, scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    matcons(&args)
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn every_bundled_scenario_runs_end_to_end() {
    let expected_verify = [
        ("counterexample.json", 0),
        ("cycle3_synth.json", 0),
        ("cycle5_infeasible.json", 1),
        ("example1.json", 0),
        ("fixed_step_square.json", 0),
        ("gradient_triangle.json", 0),
        ("lemma1_path.json", 2),
        ("metropolis_square.json", 0),
        ("symmetric_chorded_square.json", 0),
        ("triangle_identity.json", 0),
    ];
    let listed: Vec<String> = fs::read_dir(scenario(""))
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.ends_with(".json").then_some(name)
        })
        .collect();
    assert_eq!(listed.len(), expected_verify.len(), "{listed:?}");
    let tmp = TempDir::new().unwrap();
    for (name, code) in expected_verify {
        let out = tmp.path().join(name);
        let v = run_with("verify", &scenario(name), &out, &[]);
        assert_eq!(
            v.status.code(),
            Some(code),
            "{name}: {}",
            String::from_utf8_lossy(&v.stderr)
        );
        if code == 1 {
            continue;
        }
        let r = run_with("run", &scenario(name), &out, &[]);
        assert!(
            r.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
        assert!(out.join("trajectory.csv").exists());
        assert!(out.join("summary.json").exists());
        let a = run_with("analyze", &scenario(name), &out, &[]);
        assert!(
            a.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
    }
}

#[test]
fn verify_reports_witness_on_path_with_kernel() {
    let tmp = TempDir::new().unwrap();
    let o = run_with("verify", &scenario("lemma1_path.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["well_configured"], false);
    assert_eq!(v["kernel_dim"], 3);
    let witness = v["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 3);
    assert!(witness.iter().all(|row| row.as_array().unwrap().len() == 2));
}

#[test]
fn malformed_or_unknown_input_exits_one() {
    let tmp = TempDir::new().unwrap();
    let broken = write_scenario(
        tmp.path(),
        "broken.json",
        "{ \"schema_version\": 1,\n  \"graph\": ",
    );
    let o = run_with("verify", &broken, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let text = fs::read_to_string(scenario("triangle_identity.json")).unwrap();
    let unknown = text.replacen("\"name\"", "\"colour\": 1, \"name\"", 1);
    let p = write_scenario(tmp.path(), "unknown.json", &unknown);
    let o = run_with("verify", &p, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let future = text.replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
    let p = write_scenario(tmp.path(), "future.json", &future);
    assert_eq!(
        run_with("verify", &p, tmp.path(), &[]).status.code(),
        Some(1)
    );

    assert_eq!(matcons(&["verify"]).status.code(), Some(1));
}

#[test]
fn graph_file_errors_name_the_line() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("g.txt"), "3 2\n1 2\n2 9\n").unwrap();
    let p = write_scenario(
        tmp.path(),
        "s.json",
        r#"{"schema_version": 1, "graph": {"file": "g.txt"},
            "weights": {"synthesize": {"mode": "free"}}}"#,
    );
    let o = run_with("verify", &p, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn synthesized_weights_round_trip_through_verify() {
    let tmp = TempDir::new().unwrap();
    for name in [
        "cycle3_synth.json",
        "symmetric_chorded_square.json",
        "metropolis_square.json",
    ] {
        let out = tmp.path().join(name);
        let o = run_with("synth", &scenario(name), &out, &[]);
        assert!(
            o.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let weights: Value =
            serde_json::from_str(&fs::read_to_string(out.join("weights.json")).unwrap()).unwrap();
        let n = weights["n"].as_u64().unwrap();
        let m = weights["m"].as_u64().unwrap();
        let arcs: Vec<String> = weights["arcs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| format!("[{},{}]", a["j"], a["i"]))
            .collect();
        let body = format!(
            r#"{{"schema_version": 1, "graph": {{"inline": {{"m": {m}, "arcs": [{}]}}}}, "n": {n},
                "weights": {{"file": "weights.json"}}}}"#,
            arcs.join(",")
        );
        let p = write_scenario(&out, "reverify.json", &body);
        let v = run_with("verify", &p, &out, &[]);
        assert_eq!(
            v.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&v.stderr)
        );
        assert!(out.join("decomposition.json").exists());
    }
}

#[test]
fn symmetric_synthesis_writes_identical_pair_weights() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(
        "synth",
        &scenario("symmetric_chorded_square.json"),
        tmp.path(),
        &[],
    );
    assert!(o.status.success());
    let weights: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("weights.json")).unwrap())
            .unwrap();
    let arcs = weights["arcs"].as_array().unwrap();
    for a in arcs {
        let twin = arcs
            .iter()
            .find(|b| b["j"] == a["i"] && b["i"] == a["j"])
            .expect("reverse arc present");
        assert_eq!(
            serde_json::to_string(&a["C"]).unwrap(),
            serde_json::to_string(&twin["C"]).unwrap()
        );
    }
}

#[test]
fn infeasible_synthesis_is_refused() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(
        "synth",
        &scenario("cycle5_infeasible.json"),
        tmp.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("length 5 > n = 2"), "{err}");
    assert!(!tmp.path().join("weights.json").exists());
}

#[test]
fn run_summaries_match_expectations() {
    let tmp = TempDir::new().unwrap();
    let o = run_with("run", &scenario("fixed_step_square.json"), tmp.path(), &[]);
    let s = stdout_json(&o);
    assert_eq!(s["converged"], true);
    assert_eq!(s["algorithm"], "fixed_step");
    assert_eq!(s["spectral"]["ones"], 2);
    assert_eq!(s["spectral"]["outside"], 0);

    let o = matcons(&["counterexample", "--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success());
    let c = stdout_json(&o);
    assert_eq!(c["verify"]["well_configured"], true);
    assert_eq!(c["run"]["converged"], false);
    assert!(c["run"]["final_consensus_error"].as_f64().unwrap() >= 0.5);
    assert!(
        c["analyze"]["rounds"][0]["one_eigenspace_dim"]
            .as_u64()
            .unwrap()
            > 2
    );
}

#[test]
fn zero_steps_records_only_the_initial_state() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(
        "run",
        &scenario("triangle_identity.json"),
        tmp.path(),
        &["--steps", "0"],
    );
    assert!(o.status.success());
    let csv = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines,
        ["t,agent,comp_1,comp_2", "0,1,1,0", "0,2,0,1", "0,3,-1,-1"]
    );
    assert_eq!(stdout_json(&o)["steps_run"], 0);
}

#[test]
fn runs_are_byte_identical_for_a_seed() {
    let tmp = TempDir::new().unwrap();
    let read = |dir: &Path| fs::read(dir.join("trajectory.csv")).unwrap();
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    let sc = scenario("metropolis_square.json");
    for dir in [&a, &b] {
        assert!(run_with("run", &sc, dir, &["--steps", "50"])
            .status
            .success());
    }
    assert!(run_with("run", &sc, &c, &["--steps", "50", "--seed", "99"])
        .status
        .success());
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn random_initial_state_without_seed_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let text = fs::read_to_string(scenario("fixed_step_square.json")).unwrap();
    let p = write_scenario(tmp.path(), "s.json", &text.replace("{ \"seed\": 4 }", "{}"));
    let o = run_with("run", &p, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let o = run_with("run", &p, tmp.path(), &["--seed", "4", "--steps", "3"]);
    assert!(o.status.success());
}

#[test]
fn algorithm_graph_mismatch_fails_before_running() {
    let tmp = TempDir::new().unwrap();
    let text = fs::read_to_string(scenario("fixed_step_square.json")).unwrap();
    let p = write_scenario(
        tmp.path(),
        "s.json",
        &text.replace("fixed_step", "cycle_projection"),
    );
    let out = tmp.path().join("out");
    let o = run_with("run", &p, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cycle"));
    assert!(!out.join("trajectory.csv").exists());
}

#[test]
fn analyze_reports_per_subgraph_and_flags_degenerate_rounds() {
    let tmp = TempDir::new().unwrap();
    let o = run_with(
        "analyze",
        &scenario("metropolis_square.json"),
        tmp.path(),
        &[],
    );
    let rounds = stdout_json(&o)["rounds"].as_array().unwrap().clone();
    assert_eq!(rounds.len(), 2);
    assert!(rounds
        .iter()
        .all(|r| r["paracontracting"] == true && r["degenerate"] == false));

    let text = fs::read_to_string(scenario("metropolis_square.json")).unwrap();
    let idle = text.replace("[[2, 3], [4, 1]]", "[]");
    let p = write_scenario(tmp.path(), "idle.json", &idle);
    let o = run_with("analyze", &p, tmp.path(), &[]);
    let rounds = stdout_json(&o)["rounds"].as_array().unwrap().clone();
    assert_eq!(rounds[1]["degenerate"], true);
    assert_eq!(rounds[1]["ones"], 8);

    let o = run_with(
        "analyze",
        &scenario("symmetric_chorded_square.json"),
        tmp.path(),
        &[],
    );
    let r = &stdout_json(&o)["rounds"][0];
    assert_eq!(
        (r["ones"].as_u64(), r["outside"].as_u64()),
        (Some(3), Some(0))
    );
}
