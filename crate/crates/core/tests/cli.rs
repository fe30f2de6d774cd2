use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MODEL: &str = r#"
[model]
c1 = 2.0
e1 = 1.0
omega1 = 1.0
c2 = 3.0
e2 = 1.0
omega2 = 1.0
xi = 0.0
lambda = 0.001

[perturbation]
family = "reference"
phi1_amplitude = 1.0
phi2_offset = 1.1
phi2_amplitude = 1.0
epsilon = 0.05
"#;

/// `ω` giving `K_ω = 5` with the reference eigenvalue ratios.
const TWIST5: &str = "omega1 = 1.6666666666666667\nomega2 = 1.6666666666666667";

fn model_with(k5: bool, extra: &str) -> String {
    let base = if k5 { MODEL.replace("omega1 = 1.0\n", "").replace("omega2 = 1.0\n", &format!("{TWIST5}\n")) } else { MODEL.to_string() };
    format!("{base}\n{extra}")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn bykov(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bykov"));
    cmd.args(args).env_remove("BYKOV_OUT_DIR");
    if let Some(p) = env_out {
        cmd.env("BYKOV_OUT_DIR", p);
    }
    cmd.output().unwrap()
}

fn run_ok(cmd: &str, config: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = bykov(&args, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

fn validate(json: &serde_json::Value) {
    let schema: serde_json::Value = serde_json::from_str(bykov_core::io::REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(json).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

const SMALL_BUDGET: &str = "[scan.budget]\nburn_in = 1000\niterates = 20000\n";

#[test]
fn scan_four_by_one_has_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(false, &format!("[scan]\nlambdas = [1e-4, 1e-3, 1e-2, 5e-2]\nk_omegas = [2.0]\n{SMALL_BUDGET}")));
    let out = dir.path().join("out");
    run_ok("scan", &cfg, &out, &[]);
    let csv = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    let rows = data_lines(&csv);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], bykov_core::io::SCAN_HEADER.join(","));
    for line in ["# tool: bykov", "# config_sha256: ", "# seed: 0", "# config: {"] {
        assert!(csv.contains(line), "missing {line}");
    }
    let svg = std::fs::read_to_string(out.join("scan.svg")).unwrap();
    assert_eq!(svg.matches("class=\"cell\"").count(), 4);
}

#[test]
fn audit_output_validates_against_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(false, "[audit.h4]\na_points = 64\n"));
    run_ok("audit", &cfg, dir.path(), &[]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("audit.json")).unwrap()).unwrap();
    validate(&json);
    assert_eq!(json["kind"], "audit");
    assert!(json["thresholds"]["h1"]["ratio_cap"].as_f64().is_some());
    let names: Vec<&str> = json["verdicts"].as_array().unwrap().iter().map(|v| v["condition"].as_str().unwrap()).collect();
    assert_eq!(names.first().copied(), Some("H1(3)"));
    assert!(names.last().unwrap().starts_with("H7"));
}

#[test]
fn superstable_period_two_at_twist_five() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(true, ""));
    run_ok("superstable", &cfg, dir.path(), &["--period", "2"]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("superstable.json")).unwrap()).unwrap();
    validate(&json);
    let roots = json["data"]["roots"].as_array().unwrap();
    assert!(roots.iter().any(|r| r["orbit"]["minimal_period"] == 2 && !r["lambdas"].as_array().unwrap().is_empty()));
}

#[test]
fn every_json_command_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &model_with(true, "[misiurewicz]\na_points = 8\n[lyapunov.options]\niterates = 10000\n[rotation]\niterates = 2000\nseeds = 4\n"),
    );
    for (cmd, file) in [
        ("lyapunov", "lyapunov.json"),
        ("misiurewicz", "misiurewicz.json"),
        ("rotation", "rotation.json"),
        ("singular-limit", "singular_limit.json"),
    ] {
        run_ok(cmd, &cfg, dir.path(), &[]);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(file)).unwrap()).unwrap();
        validate(&json);
    }
    let csv = std::fs::read_to_string(dir.path().join("singular_limit.csv")).unwrap();
    assert_eq!(data_lines(&csv).len(), 11);
}

#[test]
fn iterate_writes_orbit_and_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(false, "[iterate]\niterates = 500\nburn_in = 100\n"));
    run_ok("iterate", &cfg, dir.path(), &[]);
    let csv = std::fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "iterate,x,y");
    assert_eq!(rows.len(), 501);
    assert!(rows[1].starts_with("100,"));
    let svg = std::fs::read_to_string(dir.path().join("orbit.svg")).unwrap();
    assert_eq!(svg.matches("class=\"pt\"").count(), 500);
}

#[test]
fn plot_circle_has_four_panels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MODEL);
    run_ok("plot-circle", &cfg, dir.path(), &[]);
    let svg = std::fs::read_to_string(dir.path().join("circle.svg")).unwrap();
    assert_eq!(svg.matches("class=\"panel\"").count(), 4);
    // Folds appear above K = sqrt(0.21) ≈ 0.458: K = 0.1 has none, the others two each.
    assert_eq!(svg.matches("class=\"critical\"").count(), 6);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(false, "[iterate]\niterates = 10\nburn_in = 0\n"));
    let env_dir = dir.path().join("env");
    let o = bykov(&["iterate", "--config", cfg.to_str().unwrap()], Some(&env_dir));
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("orbit.csv").exists());
    let flag_dir = dir.path().join("flag");
    let o = bykov(&["iterate", "--config", cfg.to_str().unwrap(), "--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.join("orbit.csv").exists());
}

#[test]
fn seed_flag_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(false, "[iterate]\niterates = 10\nburn_in = 0\n"));
    run_ok("iterate", &cfg, &dir.path().join("a"), &[]);
    run_ok("iterate", &cfg, &dir.path().join("b"), &["--seed", "7"]);
    let a = std::fs::read_to_string(dir.path().join("a/orbit.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b/orbit.csv")).unwrap();
    assert!(a.contains("# seed: 0") && b.contains("# seed: 7"));
    let hash = |s: &str| s.lines().find(|l| l.starts_with("# config_sha256")).unwrap().to_string();
    assert_ne!(hash(&a), hash(&b));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), &format!("bogus = 1\n{MODEL}"));
    let o = bykov(&["scan", "--config", unknown.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("scan.csv").exists());

    let bad_physics = write_config(dir.path(), &MODEL.replace("c1 = 2.0", "c1 = 0.5"));
    let o = bykov(&["iterate", "--config", bad_physics.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(bykov(&["scan"], None).status.code(), Some(1));
    assert_eq!(bykov(&["no-such-command"], None).status.code(), Some(1));
    assert_eq!(bykov(&["--help"], None).status.code(), Some(0));
}

#[test]
fn computation_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &model_with(false, "[iterate]\niterates = 10\nburn_in = 0\n"));
    // The output "directory" is an existing file.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let o = bykov(&["iterate", "--config", cfg.to_str().unwrap(), "--out", blocker.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_writes_leave_no_partial_outputs() {
    use bykov_core::commands::{write_outputs, Output};
    let dir = tempfile::tempdir().unwrap();
    let outputs = vec![
        Output { name: "first.csv".into(), contents: "a\n".into() },
        Output { name: "missing/second.csv".into(), contents: "b\n".into() },
    ];
    assert!(write_outputs(dir.path(), &outputs).is_err());
    assert!(!dir.path().join("first.csv").exists());
}
