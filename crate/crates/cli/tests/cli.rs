use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eitcool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eitcool")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(eitcool(&["spectrum", "--no_such_key", "1"]).status.code(), Some(1));
    assert_eq!(eitcool(&["spectrum", "--points", "abc"]).status.code(), Some(1));
    assert_eq!(eitcool(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(eitcool(&["chain-modes", "--n_ions", "40", "--omega_ax_mhz", "0.8"]).status.code(), Some(2));
    assert_eq!(eitcool(&["rabi-fit", "--data", "/definitely/not/here"]).status.code(), Some(3));
    assert_eq!(eitcool(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_then_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "# single point\nmode_freq_gamma = 0.2\nomega_1_gamma = 2.0\n").unwrap();
    let o = eitcool(&["cooling-limit", "--config", path(&cfg), "--mode_freq_gamma", "0.25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("mode_freq_gamma,mode_freq_mhz,nbar,cooling"));
    assert!(lines.next().unwrap().starts_with("0.25,4.9,"));
    assert!(lines.next().is_none());
}

#[test]
fn frequencies_accept_either_unit() {
    let a = stdout(&eitcool(&["optimize", "--mode_freq_gamma", "0.2", "--omega_1_gamma", "2"]));
    let b = stdout(&eitcool(&["optimize", "--mode_freq_gamma", "0.2", "--omega_1_mhz", "39.2"]));
    assert_eq!(a, b);
    let both = eitcool(&["optimize", "--omega_1_gamma", "2", "--omega_1_mhz", "39.2"]);
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn json_output_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("modes.json");
    let o = eitcool(&["chain-modes", "--n_ions", "3", "--format", "json", "--out", path(&out)]);
    assert!(o.status.success());
    let data: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(data["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(data["rows"].as_array().unwrap().len(), 6);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("modes.manifest.json")).unwrap()).unwrap();
    for field in ["command", "resolved_params", "grid_specs", "version", "wall_time_s"] {
        assert!(manifest.get(field).is_some(), "{field}");
    }
    assert_eq!(manifest["resolved_params"]["n_ions"], "3");
    assert!(manifest["summary"]["zigzag_margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn rabi_fit_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("flop.csv");
    let (a, b, p0) = (0.003, 0.9, 0.01);
    let mut text = String::from("t_us,p\n");
    for k in 0..60 {
        let t = 0.25 * k as f64;
        let bt = b * t;
        text.push_str(&format!("{t},{}\n", 0.5 * (1.0 - (1.0 - a * bt * bt) * bt.cos()) + p0));
    }
    fs::write(&data, text).unwrap();
    let o = eitcool(&["rabi-fit", "--data", path(&data)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((row[0] - a).abs() < 1e-8);
    assert!((row[2] - b).abs() < 1e-8);
    assert!((row[4] - p0).abs() < 1e-8);
}

#[test]
fn thermometry_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sb.txt");
    fs::write(&data, "0.1 0.2 0.01 0.0\n0.0 0.3 0 0\n").unwrap();
    let o = eitcool(&["thermometry", "--data", path(&data)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "row,ratio,nbar,nbar_err\n0,0.5,1,0.2\n1,0,0,0\n");
    fs::write(&data, "0.3 0.2\n").unwrap();
    assert_eq!(eitcool(&["thermometry", "--data", path(&data)]).status.code(), Some(2));
}

#[test]
fn global_options_after_the_command() {
    let a = stdout(&eitcool(&["--format", "json", "chain-modes", "--n_ions", "2"]));
    let b = stdout(&eitcool(&["chain-modes", "--n_ions", "2", "--format", "json"]));
    assert_eq!(a, b);
    assert!(a.contains("\"version\""));
}
