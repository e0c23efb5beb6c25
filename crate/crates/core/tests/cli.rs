use std::path::Path;

use coop_route::cli::run_cli;
use serde_json::Value;

fn run(args: &[&str], out: &Path) -> i32 {
    let mut full = vec!["coop-route"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    run_cli(full)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn ateams_run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        &[
            "--scenario",
            "scenario3",
            "--pop-size",
            "6",
            "--budget-rounds",
            "2",
            "--deterministic",
        ],
        dir.path(),
    );
    assert_eq!(code, 0);
    for f in [
        "report.json",
        "fitness_trace.csv",
        "ugv_route.csv",
        "uav_plan.csv",
        "routes.svg",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let r = report(dir.path());
    assert_eq!(r["mode"], "ateams");
    assert_eq!(r["feasible"], true);
    assert_eq!(r["total_targets"], 46);
    let covered = r["ugv"]["targets"].as_u64().unwrap() + r["uav"]["targets"].as_u64().unwrap();
    assert_eq!(covered, 46);
    assert!(r.get("wall_clock_s").is_none());

    let trace = std::fs::read_to_string(dir.path().join("fitness_trace.csv")).unwrap();
    assert!(trace.starts_with("round,agent,evals,best_min,mean_min"));
    let svg = std::fs::read_to_string(dir.path().join("routes.svg")).unwrap();
    assert!(svg.contains("class=\"ugv-path\"") && svg.contains("class=\"depot\""));
}

#[test]
fn ga_mode_reports_ga_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        &[
            "--scenario",
            "scenario3",
            "--mode",
            "ga",
            "--pop-size",
            "6",
            "--budget-rounds",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code, 0);
    let r = report(dir.path());
    assert_eq!(r["provenance"], "ga");
    assert!(r["wall_clock_s"].is_number());
}

#[test]
fn nm_mode_runs() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        &[
            "--scenario",
            "scenario3",
            "--mode",
            "nm",
            "--pop-size",
            "4",
            "--budget-rounds",
            "5",
            "--deterministic",
        ],
        dir.path(),
    );
    assert_eq!(code, 0);
    let r = report(dir.path());
    assert_eq!(r["mode"], "nm");
    assert!(r["provenance"] == "nm" || r["provenance"] == "constructor");
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--scenario", "no_such_scenario.json"], dir.path()), 1);
    assert_eq!(run(&["--scenario", "scenario1", "--mode", "sa"], dir.path()), 1);
    assert_eq!(
        run(
            &["--scenario", "scenario1", "--mode", "ga", "--pop-size", "5"],
            dir.path()
        ),
        1
    );
    assert_eq!(run(&["--scenario", "scenario1", "--threads", "0"], dir.path()), 1);
    assert_eq!(run_cli(["coop-route"]), 1);
}

#[test]
fn malformed_scenario_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"name\": \"broken\"").unwrap();
    assert_eq!(run(&["--scenario", path.to_str().unwrap()], dir.path()), 1);
}

#[test]
fn unreachable_target_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/scenario3.json");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(src).unwrap()).unwrap();
    doc["targets"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!([60.0, 60.0]));
    let path = dir.path().join("far.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let code = run(
        &[
            "--scenario",
            path.to_str().unwrap(),
            "--pop-size",
            "2",
            "--budget-rounds",
            "1",
            "--deterministic",
        ],
        dir.path(),
    );
    assert_eq!(code, 2);
}
