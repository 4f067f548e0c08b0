use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ncr-proprio");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_owned)
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(k).unwrap().to_owned()).collect()
}

fn simulate(dir: &TempDir, scenario: &Path) -> PathBuf {
    let out = dir.path().join("trace.csv");
    let o = run(&["simulate", "--scenario", p(scenario), "--config", p(&data("table2.toml")), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn ramp_trace_has_one_row_per_sample() {
    let dir = TempDir::new().unwrap();
    let trace = simulate(&dir, &data("ramp.toml"));
    assert_eq!(rows(&trace).len(), 50);
}

#[test]
fn contact_free_trace_estimates_none_everywhere() {
    let dir = TempDir::new().unwrap();
    let trace = simulate(&dir, &data("ramp.toml"));
    let out = dir.path().join("est.csv");
    let o = run(&["estimate", "--trace", p(&trace), "--config", p(&data("table2.toml")), "--out", p(&out)]);
    assert!(o.status.success());
    let modes = column(&out, "mode");
    assert_eq!(modes.len(), 50);
    assert!(modes.iter().all(|m| m == "none"), "{modes:?}");
}

#[test]
fn noiseless_tip_load_round_trip() {
    let dir = TempDir::new().unwrap();
    let scenario = write(
        &dir,
        "tip.toml",
        "duration_s = 2.0\nsample_rate_hz = 5.0\nseed = 3\n\n[noise]\npreset = \"none\"\n\n\
         [[actuation]]\ncable = 1\npull = [[0.0, \"0 mm\"], [1.0, \"1 mm\"]]\n\n\
         [[actuation]]\ncable = 2\npull = [[0.0, \"-3 mm\"]]\n\n\
         [[contact]]\nstart_s = 0.0\nend_s = 2.0\nlocation = \"tip\"\nforce = [\"-30 gf\", \"0 N\", \"0 N\"]\n",
    );
    let trace = simulate(&dir, &scenario);
    let out = dir.path().join("est.csv");
    let o = run(&["estimate", "--trace", p(&trace), "--config", p(&data("table2.toml")), "--out", p(&out), "--mode", "tip"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for fx in column(&out, "fx_gf") {
        assert!((fx.parse::<f64>().unwrap() + 30.0).abs() < 0.1, "{fx}");
    }
    let footer = std::fs::read_to_string(&out).unwrap();
    assert!(footer.contains("# mean_force_error_gf"), "{footer}");
}

#[test]
fn shape_of_rest_trace_is_straight() {
    let dir = TempDir::new().unwrap();
    let scenario = write(&dir, "rest.toml", "duration_s = 0.3\nsample_rate_hz = 10.0\nseed = 0\n");
    let trace = simulate(&dir, &scenario);
    let out = dir.path().join("shape.csv");
    let o = run(&["shape", "--trace", p(&trace), "--config", p(&data("table2.toml")), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for (x, th) in column(&out, "x_mm").iter().zip(column(&out, "theta_rad")) {
        assert_eq!(x.parse::<f64>().unwrap(), 0.0);
        assert_eq!(th.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(data("table2.toml")).unwrap();
    let bad = write(&dir, "bad.toml", &text.replace("cable_pitch_diameter = \"2.6 mm\"", "cable_pitch_diameter = \"-2.6 mm\""));
    let out = dir.path().join("t.csv");
    let o = run(&["simulate", "--scenario", p(&data("ramp.toml")), "--config", p(&bad), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("cable_pitch_diameter"), "{msg}");
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn unknown_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(data("table2.toml")).unwrap();
    let bad = write(&dir, "bad.toml", &text.replace("joint_count = 7", "joint_count = 7\njoint_cuont = 7"));
    let o = run(&["validate", "--config", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("joint_cuont"));
}

#[test]
fn missing_trace_is_an_input_error() {
    let o = run(&["estimate", "--trace", "/nonexistent/trace.csv", "--config", p(&data("table2.toml")), "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreachable_pull_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let scenario = write(
        &dir,
        "far.toml",
        "duration_s = 0.2\nsample_rate_hz = 10.0\nseed = 0\n\n[[actuation]]\ncable = 1\npull = [[0.0, \"12 mm\"]]\n",
    );
    let out = dir.path().join("t.csv");
    let o = run(&["simulate", "--scenario", p(&scenario), "--config", p(&data("table2.toml")), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validate_accepts_table_config_and_flags_soft_spine() {
    let o = run(&["validate", "--config", p(&data("table2.toml"))]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(data("table2.toml")).unwrap();
    let soft = write(&dir, "soft.toml", &text.replace("\"0.0016 mm^4\"", "\"0.000016 mm^4\""));
    let o = run(&["validate", "--config", p(&soft)]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn simulate_is_reproducible_and_seed_sensitive() {
    let dir = TempDir::new().unwrap();
    let scenario = write(
        &dir,
        "noisy.toml",
        "duration_s = 0.5\nsample_rate_hz = 10.0\nseed = 9\n\n[noise]\npreset = \"hardware\"\n",
    );
    let cfg = data("table2.toml");
    let go = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert!(run(&["simulate", "--scenario", p(&scenario), "--config", p(&cfg), "--out", p(&out), "--seed", seed]).status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(go("a.csv", "1"), go("b.csv", "1"));
    assert_ne!(go("a.csv", "1"), go("c.csv", "2"));
}
