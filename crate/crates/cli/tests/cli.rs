use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const PAPER_RADII: [f64; 3] = [0.557_785_268_440_995, 0.681_454_697_258_654, 0.928_932_801_436_375];

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curved-nbody")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Rows of a trajectory CSV as `(t, body, [w x y z vw vx vy vz])`.
fn read_rows(p: &Path) -> Vec<(f64, usize, Vec<f64>)> {
    let mut r = csv::Reader::from_path(p).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "body", "w", "x", "y", "z", "vw", "vx", "vy", "vz"]);
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap(), (2..10).map(|c| rec[c].parse().unwrap()).collect())
        })
        .collect()
}

fn lagrangian_config(dir: &Path, r: f64, t_end: f64, samples: usize) -> PathBuf {
    write_config(
        dir,
        "lagrangian.json",
        &json!({"schema_version": 1, "catalog": {"name": "lagrangian_s3", "params": {"r": r}}, "t_end": t_end, "samples": samples}),
    )
}

#[test]
fn catalog_list_names_every_orbit() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names.len(), 12);
    assert!(names.contains(&"elliptic_hyperbolic_h3".to_string()));
}

#[test]
fn lagrangian_orbit_over_ten_periods_conserves_integrals() {
    let dir = TempDir::new().unwrap();
    let alpha = (8.0 / (3f64.sqrt() * 0.125 * 3.25f64.powf(1.5))).sqrt();
    let t_end = 10.0 * 2.0 * std::f64::consts::PI / alpha;
    let cfg = lagrangian_config(dir.path(), 0.5, t_end, 201);
    let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--out", "lag.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = read_json(&dir.path().join("lag.report.json"));
    assert!(report["drift"]["max_rel_energy"].as_f64().unwrap() < 1e-8);
    assert!(report["drift"]["max_abs_angular_momentum"].as_f64().unwrap() < 1e-8);
    assert_eq!(report["termination"]["status"], "completed");
    assert_eq!(report["residual"]["pass"], true);
    let samples = report["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 201);
    assert_eq!(samples[0]["c"].as_array().unwrap().len(), 6);
    assert_eq!(read_rows(&dir.path().join("lag.csv")).len(), 201 * 3);
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let cfg = lagrangian_config(dir.path(), 0.62, 1.0, 3);
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--out", "t.csv"])), 0);
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let field = text.lines().nth(2).unwrap().split(',').nth(2).unwrap().to_string();
    let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{field}");
}

#[test]
fn zero_curvature_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", &json!({"schema_version": 1, "kappa": 0.0, "positions": [[1.0, 0.0, 0.0, 0.0]]}));
    let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("curvature must be nonzero"));
}

#[test]
fn coincident_bodies_are_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"schema_version": 1, "kappa": 1.0, "positions": [[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]}),
    );
    let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Collision(0,2)"), "{}", stderr(&o));
}

#[test]
fn malformed_configs_are_rejected() {
    let dir = TempDir::new().unwrap();
    for (name, v) in [
        ("version.json", json!({"schema_version": 2, "catalog": {"name": "lagrangian_s3"}})),
        ("unknown.json", json!({"schema_version": 1, "catalog": {"name": "nope"}})),
        ("both.json", json!({"schema_version": 1, "kappa": 1.0, "positions": [[1.0, 0.0, 0.0, 0.0]], "catalog": {"name": "lagrangian_s3"}})),
        ("field.json", json!({"schema_version": 1, "kapa": 1.0})),
        ("off.json", json!({"schema_version": 1, "kappa": 1.0, "positions": [[1.0, 0.1, 0.0, 0.0]]})),
    ] {
        let cfg = write_config(dir.path(), name, &v);
        let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{name}: {}", stderr(&o));
    }
    assert_eq!(code(&run(dir.path(), &["simulate"])), 2);
}

#[test]
fn collapse_stops_with_singularity_exit_code() {
    let dir = TempDir::new().unwrap();
    let a: f64 = 0.05;
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"schema_version": 1, "kappa": 1.0, "positions": [[1.0, 0.0, 0.0, 0.0], [a.cos(), a.sin(), 0.0, 0.0]]}),
    );
    let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--out", "c.csv", "--t-end", "5"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let report = read_json(&dir.path().join("c.report.json"));
    assert_eq!(report["termination"]["status"], "singularity");
    assert_eq!(report["termination"]["pair"], json!([0, 1]));
}

#[test]
fn verify_reports_the_pentatope_condition() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "p.json", &json!({"schema_version": 1, "catalog": {"name": "pentatope_double"}}));
    let o = run(dir.path(), &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    assert!(v["conditions"].as_array().unwrap().contains(&json!("|α|=|β|")));
}

#[test]
fn verify_fails_on_a_perturbed_pentatope() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "p.json", &json!({"schema_version": 1, "catalog": {"name": "pentatope_double", "perturb_phase": 1e-3}}));
    let o = run(dir.path(), &["verify", "--config", cfg.to_str().unwrap(), "--out", "v.json"]);
    assert_eq!(code(&o), 5);
    let v = read_json(&dir.path().join("v.json"));
    assert_eq!(v["pass"], false);
    assert!(v["max_abs"].as_f64().unwrap() > 1e-9);
}

#[test]
fn verify_accepts_an_explicit_spec() {
    let dir = TempDir::new().unwrap();
    let emitted = run(dir.path(), &["catalog", "emit", "elliptic_hyperbolic_h3", "--out", "e.json"]);
    assert_eq!(code(&emitted), 0);
    let e = read_json(&dir.path().join("e.json"));
    assert_eq!(e["spec"]["kind"], "NegEllipticHyperbolic");
    let o = run(dir.path(), &["verify", "--config", "e.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout_json(&o)["criterion"], "negative-elliptic-hyperbolic");
}

#[test]
fn verify_excludes_a_parabolic_ansatz() {
    let dir = TempDir::new().unwrap();
    let body = |a: f64, b: f64, g: f64| json!({"type": "parabolic", "alpha": a, "beta": b, "gamma": g, "delta": (a * a + b * b + g * g + 1.0f64).sqrt()});
    let cfg = write_config(
        dir.path(),
        "p.json",
        &json!({"schema_version": 1, "spec": {"kind": "NegParabolic", "kappa": -1.0, "masses": [1.0, 2.0], "bodies": [body(0.3, 0.2, 0.5), body(-0.4, 0.1, -0.7)]}}),
    );
    let o = run(dir.path(), &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 5);
    let v = stdout_json(&o);
    assert_eq!(v["excluded"], true);
    assert!(v["drift_coefficient"].as_f64().unwrap() > 0.0);
    assert!(v["eom_residual_t0"].as_f64().unwrap() > 1e-6);
}

#[test]
fn trajectory_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = lagrangian_config(dir.path(), 0.62, 6.0, 61);
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--out", "a.csv"])), 0);
    let rows = read_rows(&dir.path().join("a.csv"));
    let first: Vec<_> = rows.iter().filter(|r| r.0 == 0.0).collect();
    let again = write_config(
        dir.path(),
        "again.json",
        &json!({
            "schema_version": 1,
            "kappa": 1.0,
            "masses": [1.0, 1.0, 1.0],
            "positions": first.iter().map(|r| r.2[..4].to_vec()).collect::<Vec<_>>(),
            "velocities": first.iter().map(|r| r.2[4..].to_vec()).collect::<Vec<_>>(),
            "t_end": 6.0,
            "samples": 61
        }),
    );
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", again.to_str().unwrap(), "--out", "b.csv"])), 0);
    let replay = read_rows(&dir.path().join("b.csv"));
    assert_eq!(rows.len(), replay.len());
    for (a, b) in rows.iter().zip(&replay) {
        assert_eq!((a.0, a.1), (b.0, b.1));
        for (x, y) in a.2.iter().zip(&b.2) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "r.json", &json!({"schema_version": 1, "kappa": -1.0, "random_state": {"n": 4, "speed": 0.2}, "t_end": 2.0}));
    for out in ["a.csv", "b.csv"] {
        assert_eq!(code(&run(dir.path(), &["simulate", "--config", "r.json", "--seed", "11", "--out", out])), 0);
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", "c.csv"])), 0);
    assert_ne!(read("a.csv"), read("c.csv"));
}

#[test]
fn classify_reads_a_trajectory_file() {
    let dir = TempDir::new().unwrap();
    let cfg = lagrangian_config(dir.path(), 0.62, 6.0, 40);
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--out", "a.csv"])), 0);
    let o = run(dir.path(), &["classify", "a.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["tag"], "CircleMotion");
    assert_eq!(v["momentum_pattern"], json!(["wx"]));
    assert!((v["kappa"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let h = write_config(dir.path(), "h.json", &json!({"schema_version": 1, "catalog": {"name": "elliptic_hyperbolic_h3"}, "t_end": 3.0, "samples": 30}));
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", h.to_str().unwrap(), "--out", "h.csv"])), 0);
    let v = stdout_json(&run(dir.path(), &["classify", "h.csv"]));
    assert_eq!(v["tag"], "HyperbolicCylinder");
    assert!((v["kappa"].as_f64().unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn classify_needs_enough_samples() {
    let dir = TempDir::new().unwrap();
    let cfg = lagrangian_config(dir.path(), 0.62, 1.0, 4);
    assert_eq!(code(&run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--out", "a.csv"])), 0);
    let o = run(dir.path(), &["classify", "a.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("at least 8 samples"));
}

#[test]
fn scan_rejects_bad_grids() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["scan-stability", "--steps", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("at least 8 grid points required"));
    assert_eq!(code(&run(dir.path(), &["scan-stability", "--r-max", "1.0"])), 2);
}

#[test]
fn default_scan_finds_three_transitions() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["scan-stability", "--out", "scan.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = read_json(&dir.path().join("scan.transitions.json"));
    let radii: Vec<f64> = v["transitions"].as_array().unwrap().iter().map(|t| t["r"].as_f64().unwrap()).collect();
    assert_eq!(radii.len(), 3);
    for (r, p) in radii.iter().zip(PAPER_RADII) {
        assert!((r - p).abs() < 5e-4);
    }
    let mut rdr = csv::Reader::from_path(dir.path().join("scan.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["r", "max_off_unit", "classification"]);
    assert_eq!(rdr.records().count(), 80);
}
