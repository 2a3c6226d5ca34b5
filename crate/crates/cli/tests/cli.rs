use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use vortex_core::format::parse_geometry;
use vortex_core::geometry::curve_length;

fn workdir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn vortex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortex")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = vortex(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn fails_with(args: &[&str], code: i32) -> String {
    let out = vortex(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_are_deterministic() {
    let d = workdir("determinism");
    let (a, b) = (d.join("a.txt"), d.join("b.txt"));
    ok(&["fixture", "random_vortices", "--n", "4", "--seed", "9", "--out", s(&a)]);
    ok(&["fixture", "random_vortices", "--n", "4", "--seed", "9", "--out", s(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    ok(&["fixture", "random-vortices", "--n", "4", "--seed", "10", "--out", s(&b)]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn icosphere_fixture_shape() {
    let d = workdir("icosphere");
    let f = d.join("s.txt");
    ok(&["fixture", "icosphere4d", "--radius", "1", "--level", "4", "--out", s(&f)]);
    let g = parse_geometry(&fs::read_to_string(&f).unwrap()).unwrap();
    let m = g.membrane().unwrap();
    assert_eq!(m.vertex_count(), 10 * 4usize.pow(4) + 2);
    assert!(m.is_closed());
    let area = vortex_core::geometry::membrane_volume(&m);
    assert!((area / (4.0 * PI) - 1.0).abs() < 5e-3);
}

#[test]
fn circle_fixture_perimeter() {
    let d = workdir("circle");
    let f = d.join("c.txt");
    ok(&["fixture", "circle3d", "--n", "512", "--out", s(&f)]);
    let c = parse_geometry(&fs::read_to_string(&f).unwrap()).unwrap().curve().unwrap();
    let exact = 2.0 * 512.0 * (PI / 512.0).sin();
    assert!((curve_length(&c) - exact).abs() < 1e-12);
}

#[test]
fn malformed_mesh_reports_line() {
    let d = workdir("malformed");
    let f = d.join("bad.txt");
    fs::write(&f, "dim 4\nv 0 0 0 0\nv 1 0 0\n").unwrap();
    let err = fails_with(&["analyze", "energy-slope", "--mesh", s(&f), "--out", s(&d.join("r.json"))], 2);
    assert!(err.contains("format::parse_geometry") && err.contains("line 3"), "{err}");
}

#[test]
fn missing_out_and_unknown_fixture_are_rejected() {
    fails_with(&["fixture", "circle3d"], 2);
    fails_with(&["fixture", "klein_bottle", "--out", "x"], 2);
    let err = fails_with(&["fixture", "circle3d", "--n", "2", "--out", "x"], 2);
    assert!(err.contains("fixtures::make_fixture"), "{err}");
}

#[test]
fn flat_patch_lia_has_no_direction() {
    let d = workdir("flat");
    let (f, r) = (d.join("p.txt"), d.join("r.json"));
    ok(&["fixture", "flatpatch4d", "--side", "2", "--cells", "32", "--out", s(&f)]);
    ok(&["analyze", "lia-slope", "--mesh", s(&f), "--vertex", "544", "--eps-decades", "1", "--out", s(&r)]);
    let v = json(&r);
    assert!(v["slope_norm"].as_f64().unwrap() < 1e-10);
    assert!(v["direction_error_deg"].is_null());
    assert!(v["c_n_estimate"].is_null());
    assert!(v["version"].as_str().unwrap().starts_with("vortex "));
}

#[test]
fn circle_analyses_match_classical_constant() {
    let d = workdir("circle_slopes");
    let (f, r) = (d.join("c.txt"), d.join("r.json"));
    ok(&["fixture", "circle3d", "--n", "1024", "--out", s(&f)]);
    ok(&["analyze", "lia-slope", "--mesh", s(&f), "--vertex", "0", "--out", s(&r)]);
    let slope = json(&r)["slope_norm"].as_f64().unwrap();
    assert!((slope * 4.0 * PI - 1.0).abs() < 0.1, "{slope}");
    ok(&["analyze", "energy-slope", "--mesh", s(&f), "--eps-decades", "1.2", "--out", s(&r)]);
    let per_length = json(&r)["slope_per_volume"].as_f64().unwrap();
    assert!((per_length * 4.0 * PI - 1.0).abs() < 0.1, "{per_length}");
}

#[test]
fn membrane_simulation_translates_and_is_reproducible() {
    let d = workdir("membrane");
    let (f, a, b) = (d.join("s.txt"), d.join("a.ndjson"), d.join("b.ndjson"));
    ok(&["fixture", "icosphere4d", "--level", "2", "--out", s(&f)]);
    let args = |o: &PathBuf| -> Vec<String> {
        ["simulate", "membrane", "--input", s(&f), "--dt", "1e-3", "--steps", "10", "--dump-every", "5", "--out", s(o)]
            .iter()
            .map(|x| x.to_string())
            .collect()
    };
    ok(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    ok(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), fs::read(&b).unwrap().as_slice());
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 11);
    assert!(recs[5]["vertices"].is_array() && recs[4].get("vertices").is_none());
    let z = recs[10]["centroid"][3].as_f64().unwrap();
    assert!((z - 0.01).abs() < 1e-3, "{z}");
}

#[test]
fn point_vortex_csv_and_collision_exit() {
    let d = workdir("points");
    let (f, o) = (d.join("v.txt"), d.join("d.csv"));
    ok(&["fixture", "random_vortices", "--n", "3", "--seed", "1", "--out", s(&f)]);
    ok(&["simulate", "points2d", "--input", s(&f), "--dt", "1e-3", "--steps", "5", "--scheme", "implicit_midpoint", "--out", s(&o)]);
    let csv = fs::read_to_string(&o).unwrap();
    assert!(csv.starts_with("step,t,hamiltonian,px,py,angular\n"));
    assert_eq!(csv.lines().count(), 7);
    fs::write(&f, "pv 0 0 1\npv 5e-7 0 1\n").unwrap();
    let err = fails_with(&["simulate", "points2d", "--input", s(&f), "--dt", "1e-3", "--steps", "1", "--out", s(&o)], 3);
    assert!(err.contains("pointvortex2d::step2d"), "{err}");
}

#[test]
fn filament_and_sheet_family_records() {
    let d = workdir("filament");
    let (c, o) = (d.join("c.txt"), d.join("t.ndjson"));
    ok(&["fixture", "circle3d", "--n", "64", "--out", s(&c)]);
    ok(&["simulate", "filament3d", "--input", s(&c), "--dt", "1e-3", "--steps", "4", "--dump-every", "2", "--out", s(&o)]);
    let recs: Vec<Value> = fs::read_to_string(&o).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 5);
    assert_eq!(recs[2]["vertices"].as_array().unwrap().len(), 64);
    let l0 = recs[0]["length"].as_f64().unwrap();
    assert!((recs[4]["length"].as_f64().unwrap() - l0).abs() < 1e-10);

    let fib = d.join("f.txt");
    ok(&["fixture", "cylinder_fibration", "--fibers", "3", "--n", "32", "--out", s(&fib)]);
    ok(&["simulate", "sheet-family", "--input", s(&fib), "--dt", "1e-3", "--steps", "3", "--out", s(&o)]);
    let recs: Vec<Value> = fs::read_to_string(&o).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 4);
    let h0 = recs[0]["hamiltonian"].as_f64().unwrap();
    assert!((recs[3]["hamiltonian"].as_f64().unwrap() - h0).abs() < 1e-9 * h0);
}

#[test]
fn evaluators() {
    let d = workdir("evaluate");
    let (c, fields, r) = (d.join("c.txt"), d.join("f.txt"), d.join("r.json"));
    ok(&["fixture", "circle3d", "--n", "1024", "--out", s(&c)]);
    let curve = parse_geometry(&fs::read_to_string(&c).unwrap()).unwrap().curve().unwrap();
    let mut text = String::new();
    for _ in curve.points() {
        text.push_str("V 0 0 1\n");
    }
    for p in curve.points() {
        text.push_str(&format!("W {} {} {}\n", p[0], p[1], p[2]));
    }
    fs::write(&fields, text).unwrap();
    ok(&["evaluate", "mw", "--input", s(&c), "--fields", s(&fields), "--out", s(&r)]);
    assert!((json(&r)["value"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-3);

    let v = d.join("v.txt");
    fs::write(&v, "pv 0 0 2\npv 1 0 1\n").unwrap();
    fs::write(&fields, "V 1 0\nV 0 0\nW 0 1\nW 0 0\n").unwrap();
    ok(&["evaluate", "kk", "--input", s(&v), "--fields", s(&fields), "--out", s(&r)]);
    assert!((json(&r)["value"].as_f64().unwrap().abs() - 2.0).abs() < 1e-12);

    let sheet = d.join("t.txt");
    ok(&["fixture", "torus_band_sheet", "--nu", "16", "--nv", "8", "--out", s(&sheet)]);
    let g = parse_geometry(&fs::read_to_string(&sheet).unwrap()).unwrap();
    let mut text = String::new();
    for _ in 0..g.vertices.len() {
        text.push_str("V 1 0 0\n");
    }
    for _ in 0..g.vertices.len() {
        text.push_str("W 0 1 0\n");
    }
    fs::write(&fields, &text).unwrap();
    ok(&["evaluate", "sheet-form", "--input", s(&sheet), "--fields", s(&fields), "--out", s(&r)]);
    assert!(json(&r)["value"].as_f64().unwrap().is_finite());
    let err = fails_with(&["evaluate", "pairing", "--input", s(&sheet), "--fields", s(&fields), "--out", s(&r)], 2);
    assert!(err.contains("symplectic::sheet_pairing"), "{err}");
}

#[test]
fn scenario_files() {
    let d = workdir("scenario");
    ok(&["fixture", "icosphere4d", "--level", "2", "--out", s(&d.join("s.txt"))]);
    let cfg = d.join("run.toml");
    fs::write(&cfg, "kind = \"membrane\"\ninput = \"s.txt\"\nout = \"traj.ndjson\"\ndt = 1e-3\nsteps = 3\n").unwrap();
    ok(&["run", "--config", s(&cfg)]);
    assert_eq!(fs::read_to_string(d.join("traj.ndjson")).unwrap().lines().count(), 4);

    fs::write(&cfg, "kind = \"membrane\"\ninput = \"s.txt\"\nout = \"t.ndjson\"\ndt = 1e-3\nsteps = 3\ncolour = 1\n").unwrap();
    let err = fails_with(&["run", "--config", s(&cfg)], 2);
    assert!(err.contains("scenario::parse") && err.contains("colour"), "{err}");
    fs::write(&cfg, "kind = \"membrane\"\ninput = \"s.txt\"\nout = \"t.ndjson\"\ndt = -1e-3\nsteps = 3\n").unwrap();
    fails_with(&["run", "--config", s(&cfg)], 2);
    fs::write(&cfg, "kind = \"energy_slope\"\ninput = \"s.txt\"\nout = \"t.json\"\nsteps = 3\n").unwrap();
    let err = fails_with(&["run", "--config", s(&cfg)], 2);
    assert!(err.contains("steps"), "{err}");
    fs::write(&cfg, "kind = \"invariants\"\nfixture = \"flatpatch4d\"\nout = \"inv.json\"\n").unwrap();
    ok(&["run", "--config", s(&cfg)]);
    assert_eq!(json(&d.join("inv.json"))["passed"], Value::Bool(true));
}

#[test]
fn check_commands() {
    let d = workdir("check");
    let r = d.join("r.json");
    ok(&["check", "invariants", "--fixture", "random_vortices", "--out", s(&r)]);
    let v = json(&r);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 2);
    ok(&["check", "acceptance", "--criterion", "1", "--out", s(&r)]);
    let v = json(&r);
    assert_eq!(v["checks"][0]["passed"], Value::Bool(true));
    assert!(v["checks"][0]["measured"]["return_error"].as_f64().unwrap() < 1e-6);
    fails_with(&["check", "acceptance", "--criterion", "11", "--out", s(&r)], 2);
    fails_with(&["check", "invariants", "--fixture", "nope", "--out", s(&r)], 2);
}
