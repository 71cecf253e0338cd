use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda-qpt")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn header(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap().lines().next().unwrap().to_string()
}

fn json(dir: &Path, file: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(file)).unwrap()).unwrap()
}

#[test]
fn spectrum_has_one_row_per_state() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["spectrum", "--n", "8", "--z", "1.0", "--delta", "0"]);
    let text = fs::read_to_string(d.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,energy,energy_per_N_rho");
    assert_eq!(lines.len(), 1 + 15);
    // 17 significant digits
    let e: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(e[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    let m = json(d.path(), "spectrum.csv.manifest.json");
    assert_eq!(m["subcommand"], "spectrum");
    assert_eq!(m["parameters"]["n"], 8);
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(m["version"].is_string());
}

#[test]
fn odd_atom_number_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["spectrum", "--n", "7"]).status.code(), Some(2));
    fs::write(d.path().join("odd.json"), r#"{"n": 9}"#).unwrap();
    assert_eq!(run(d.path(), &["basis", "--config", "odd.json"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["basis"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["basis", "--n", "2", "--bogus"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_one() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["gap-min", "--n", "10", "--z-lo", "0.2", "--z-hi", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bracket"));
}

#[test]
fn basis_to_stdout() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(d.path(), &["basis", "--n", "2", "-o", "-"]);
    assert_eq!(out, "index,n_a,n_g,n_e\n0,2,0,0\n1,0,1,0\n2,0,0,1\n");
    assert!(d.path().join("basis.manifest.json").exists());
}

#[test]
fn flags_override_config() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.json"), r#"{"n": 4, "z": 2.0, "delta": 0.3, "output": "from_config.csv"}"#).unwrap();
    ok(d.path(), &["spectrum", "--config", "c.json", "--z", "0.5"]);
    let m = json(d.path(), "from_config.csv.manifest.json");
    assert_eq!(m["parameters"]["z"], 0.5);
    assert_eq!(m["parameters"]["delta"], 0.3);
    assert_eq!(m["parameters"]["n"], 4);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.json"), r#"{"n": 12, "z_min": 1.0, "z_max": 3.0, "z_steps": 9}"#).unwrap();
    ok(d.path(), &["sweep", "--config", "c.json", "-o", "a.csv"]);
    ok(d.path(), &["sweep", "--config", "c.json", "-o", "b.csv", "--threads", "1"]);
    assert_eq!(fs::read(d.path().join("a.csv")).unwrap(), fs::read(d.path().join("b.csv")).unwrap());
}

#[test]
fn every_subcommand_writes_its_schema() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["sweep", "--n", "10", "--z-min", "0.5", "--z-max", "3", "--z-steps", "6"]);
    assert_eq!(header(p, "sweep.csv"), "z,E0,E1,gap,atomic_fraction");

    ok(p, &["meanfield", "--z-min", "1.5", "--z-max", "2.5", "--z-steps", "11"]);
    assert_eq!(header(p, "meanfield.csv"), "z,mu,E,dEdz,d2Edz2,a2,p1,p2");

    ok(p, &["geophase", "--z", "0.5,3", "--period", "20"]);
    assert_eq!(header(p, "geophase.csv"), "z,T,lambda_total,lambda_dynamic,lambda_g,berry_linearized");
    assert_eq!(fs::read_to_string(p.join("geophase.csv")).unwrap().lines().count(), 3);

    ok(p, &["trajectory", "--z", "1", "--period", "10", "--samples", "5"]);
    assert_eq!(header(p, "trajectory.csv"), "t,phi,re_a,im_a,re_bg,im_bg,re_be,im_be,norm,p1,p2");
    assert_eq!(fs::read_to_string(p.join("trajectory.csv")).unwrap().lines().count(), 7);

    ok(p, &["gap-min", "--n", "20", "--z-lo", "1.0", "--z-hi", "2.1"]);
    assert_eq!(header(p, "gap-min.csv"), "N,z_N,gap_min");

    ok(p, &["fidelity", "--n", "12", "--alpha", "0.3", "--z-min", "1", "--z-max", "3", "--z-steps", "21"]);
    assert_eq!(header(p, "fidelity.csv"), "z,F");
    let dip = json(p, "fidelity.dip.json");
    assert!(dip["f_min"].as_f64().unwrap() < 1.0);
}

#[test]
fn scaling_writes_fit_report() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["scaling", "--n-list", "20,28,40,56,80", "--z-lo", "1.0", "--z-hi", "2.1"]);
    assert_eq!(header(p, "scaling.csv"), "N,z_N,gap_min");
    let fit = json(p, "scaling.fit.json");
    for key in ["nu", "kappa", "zeta", "gamma", "r2_nu", "r2_zeta"] {
        assert!(fit[key].is_number(), "{key}");
    }
    ok(p, &["scaling", "--n-list", "20,28,40", "--z-lo", "1.0", "--z-hi", "2.1", "-o", "short.csv"]);
    let short = json(p, "short.fit.json");
    assert!(short["nu"].is_null() && short["fit_error"].is_string());
}

#[test]
fn json_format_and_raw_units() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["spectrum", "--n", "2", "--z", "0", "--rho", "2", "--format", "json"]);
    let rows = json(p, "spectrum.json");
    let e0 = rows[0]["energy"].as_f64().unwrap();
    assert!((e0 + 1.0).abs() < 1e-12);
    ok(p, &["spectrum", "--n", "2", "--z", "0", "--rho", "2", "--format", "json", "--raw-units", "-o", "raw.json"]);
    let raw = json(p, "raw.json");
    assert!((raw[0]["energy"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert!((raw[0]["energy_per_N_rho"].as_f64().unwrap() + 0.5).abs() < 1e-12);
}
