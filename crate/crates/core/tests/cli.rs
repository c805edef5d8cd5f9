use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynregret"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = r#"{
  "schema_version": 1,
  "experiments": [
    {"scenario": {"generate": {"generator": "drifting_quadratic", "dim": 3, "horizon": 60,
                               "lambda": 1.0, "L": 2.0, "drift": 0.01, "seed": 4}},
     "algorithms": [{"kind": "omgd_default"}, {"kind": "greedy"}]},
    {"scenario": {"generate": {"generator": "instance2", "horizon": 4}},
     "algorithms": [{"kind": "greedy"}]}
  ]
}"#;

#[test]
fn verify_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "small.json", SMALL);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("greedy_path_length"));
    assert!(!table.contains("FAIL"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["scenarios"][0]["algorithms"][0]["params"]["K"], 17);
}

#[test]
fn broken_config_exits_one_and_names_the_failing_row() {
    let path = configs().join("broken.json");
    let out = run(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let table = String::from_utf8(out.stdout).unwrap();
    let failing: Vec<_> = table.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(
        failing.iter().any(|l| l.contains("function_variation")),
        "{table}"
    );
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = write(dir.path(), "bad.json", "{ \"schema_version\": 1, ");
    assert_eq!(code(&run(&["verify", "--config", bad_json.to_str().unwrap()])), 2);

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&run(&["run", "--config", missing.to_str().unwrap()])), 2);

    let linear_default = write(
        dir.path(),
        "lin.json",
        r#"{"schema_version": 1, "experiments": [{
            "scenario": {"generate": {"generator": "instance2", "horizon": 4}},
            "algorithms": [{"kind": "omgd_default"}]}]}"#,
    );
    assert_eq!(
        code(&run(&["verify", "--config", linear_default.to_str().unwrap()])),
        2
    );

    let too_fast = write(
        dir.path(),
        "fast.json",
        &SMALL.replace("\"drift\": 0.01", "\"drift\": 0.9"),
    );
    assert_eq!(code(&run(&["verify", "--config", too_fast.to_str().unwrap()])), 2);

    let good = write(dir.path(), "good.json", SMALL);
    let args = [
        "verify",
        "--config",
        good.to_str().unwrap(),
        "--alpha-grid",
        "1:0.1:3",
    ];
    assert_eq!(code(&run(&args)), 2);
    let args = ["verify", "--config", good.to_str().unwrap(), "--format", "xml"];
    assert_eq!(code(&run(&args)), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn inline_scenario_with_inconsistent_certificate_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"schema_version": 1, "experiments": [{
        "scenario": {"inline": {"schema_version": 1, "label": "x", "horizon": 1,
            "set": {"kind": "simplex", "dimension": 2},
            "certificate": {"lambda": 2.0, "L": 1.0, "G": 1.0},
            "losses": [{"kind": "linear", "w": [1.0, 0.0]}]}},
        "algorithms": [{"kind": "greedy"}]}]}"#;
    let path = write(dir.path(), "inline.json", text);
    let out = run(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda <= L"));
}

#[test]
fn run_prints_json_without_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "small.json", SMALL);
    let out = run(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["scenarios"].as_array().unwrap().len(), 2);
}

#[test]
fn seed_flag_changes_generated_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "small.json", SMALL);
    let json = |seed: &str| {
        let out = run(&["run", "--config", config.to_str().unwrap(), "--seed", seed]);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["scenarios"][0]["regularity"].clone()
    };
    assert_eq!(json("1"), json("1"));
    assert_ne!(json("1"), json("2"));
}

#[test]
fn csv_format_writes_per_round_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "small.json", SMALL);
    let out_dir = dir.path().join("csv");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rounds = std::fs::read_to_string(out_dir.join("s00_a00_rounds.csv")).unwrap();
    assert_eq!(rounds.lines().count(), 61);
    assert!(rounds
        .lines()
        .next()
        .unwrap()
        .starts_with("t,inst_regret,cum_regret,bound_path_length"));
    let traj = std::fs::read_to_string(out_dir.join("s01_a00_trajectory.csv")).unwrap();
    assert_eq!(traj.lines().nth(1).unwrap(), "1,0.5;0.5,1;0,-0.25,-0.5,0.25");
    assert!(out_dir.join("summary.csv").exists());
    assert!(out_dir.join("verdicts.csv").exists());
}

#[test]
fn gen_writes_loadable_scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "small.json", SMALL);
    let out_dir = dir.path().join("scenarios");
    let out = run(&[
        "gen",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut files: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 2);
    let text = std::fs::read_to_string(&files[1]).unwrap();
    let scenario = dynregret::scenarios::load_scenario(&text).unwrap();
    assert_eq!(scenario, dynregret::scenarios::instance2(4).unwrap());

    // a config that reads the generated file back verifies the same way
    let from_file = write(
        dir.path(),
        "from_file.json",
        &format!(
            r#"{{"schema_version": 1, "experiments": [{{"scenario": {{"file": "scenarios/{}"}},
                "algorithms": [{{"kind": "greedy"}}]}}]}}"#,
            files[1].file_name().unwrap().to_str().unwrap()
        ),
    );
    assert_eq!(
        code(&run(&["verify", "--config", from_file.to_str().unwrap()])),
        0
    );
}

#[test]
fn sweep_emits_a_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "sweep.json",
        r#"{"schema_version": 1, "experiments": [{
            "scenario": {"generate": {"generator": "drifting_quadratic", "dim": 2, "horizon": 50,
                                      "lambda": 1.0, "L": 1.0, "drift": 0.0, "seed": 3}},
            "algorithms": [{"kind": "omgd_default"}]}]}"#,
    );
    let out_dir = dir.path().join("sweep");
    let out = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--vary",
        "drift",
        "--values",
        "0,0.01,0.02",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let out = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--vary",
        "eta",
        "--values",
        "1",
    ]);
    assert_eq!(code(&out), 2);
}
