use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use vortex_core::biotsavart::{eps_ladder, lia_slope, Carrier, VortexFilament};
use vortex_core::checks::{self, CheckReport};
use vortex_core::energy::energy_slope;
use vortex_core::filament3d::{evolve_filament_with, FilamentOptions};
use vortex_core::format::{self, GeometryFile};
use vortex_core::geometry::curve_length;
use vortex_core::membrane_flow::{centroid, evolve_membrane_with};
use vortex_core::pointvortex2d::{diagnostics, step2d, Scheme};
use vortex_core::symplectic::{self, sheet_family_binormal_step};
use vortex_core::{fixtures, Vector};

use crate::args::{Analyze, Check, Command, Evaluate, Fixture, Simulate, Stepping};
use crate::{read_input, write_output, CliError, CliResult, Op, VERSION};

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate(s) => simulate(s),
        Command::Analyze(a) => analyze(a),
        Command::Evaluate(e) => evaluate(e),
        Command::Fixture(f) => fixture(f),
        Command::Check(c) => check(c),
        Command::Run { config } => crate::scenario::run_file(&config),
    }
}

fn load_geometry(path: &Path) -> CliResult<GeometryFile> {
    format::parse_geometry(&read_input(path)?).op("format::parse_geometry")
}

fn coords(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::invalid("cli::write_output", e.to_string()))?;
    text.push('\n');
    write_output(path, &text)
}

fn ndjson_line(out: &mut String, value: &impl Serialize) {
    out.push_str(&serde_json::to_string(value).expect("plain data serializes"));
    out.push('\n');
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn check_stepping(run: &Stepping, op: &'static str) -> CliResult<()> {
    if !(run.dt > 0.0) || !run.dt.is_finite() {
        return Err(CliError::invalid(op, format!("--dt must be positive, got {}", run.dt)));
    }
    Ok(())
}

fn simulate(cmd: Simulate) -> CliResult<()> {
    match cmd {
        Simulate::Points2d { run, scheme } => {
            const OP: &str = "pointvortex2d::step2d";
            check_stepping(&run, OP)?;
            let scheme: Scheme = scheme.parse().op(OP)?;
            let mut cfg = format::parse_vortices(&read_input(&run.input)?).op("format::parse_vortices")?;
            let csv = is_csv(&run.out);
            let mut out = String::new();
            if csv {
                out.push_str("step,t,hamiltonian,px,py,angular\n");
            }
            for s in 0..=run.steps {
                if s > 0 {
                    cfg = step2d(&cfg, run.dt, scheme).op(OP)?;
                }
                let d = diagnostics(&cfg, s as f64 * run.dt).op("pointvortex2d::diagnostics")?;
                if csv {
                    let _ = writeln!(out, "{s},{},{},{},{},{}", d.t, d.hamiltonian, d.px, d.py, d.angular);
                } else {
                    ndjson_line(
                        &mut out,
                        &json!({
                            "step": s, "t": d.t, "hamiltonian": d.hamiltonian,
                            "px": d.px, "py": d.py, "angular": d.angular,
                            "positions": cfg.positions(),
                        }),
                    );
                }
            }
            write_output(&run.out, &out)
        }
        Simulate::Filament3d { run, dump_every, resample_every, self_intersection } => {
            const OP: &str = "filament3d::evolve_filament";
            check_stepping(&run, OP)?;
            if let Some(f) = self_intersection {
                if !(f > 0.0) {
                    return Err(CliError::invalid(OP, "--self-intersection must be positive"));
                }
            }
            let curve = load_geometry(&run.input)?.curve().op("format::curve")?;
            let opts = FilamentOptions { resample_every, self_intersection_fraction: self_intersection };
            let mut out = String::new();
            let emit = |out: &mut String, s: usize, t: f64, c: &vortex_core::geometry::DiscreteCurve| {
                let mut rec = json!({"step": s, "t": t, "length": curve_length(c)});
                if dump_every > 0 && s % dump_every == 0 {
                    rec["vertices"] = json!(c.points().iter().map(coords).collect::<Vec<_>>());
                }
                ndjson_line(out, &rec);
            };
            emit(&mut out, 0, 0.0, &curve);
            let result = evolve_filament_with(&curve, run.dt, run.steps, &opts, |s, t, c| emit(&mut out, s, t, c));
            // Keep the partial trajectory when the run aborts.
            write_output(&run.out, &out)?;
            result.op(OP).map(|_| ())
        }
        Simulate::Membrane { run, dump_every } => {
            const OP: &str = "membrane_flow::evolve_membrane";
            check_stepping(&run, OP)?;
            let mem = load_geometry(&run.input)?.membrane().op("format::membrane")?;
            let mut out = String::new();
            let emit = |out: &mut String, s: usize, t: f64, m: &vortex_core::geometry::DiscreteMembrane| {
                let mut rec = json!({
                    "step": s, "t": t,
                    "volume": vortex_core::geometry::membrane_volume(m),
                    "centroid": coords(&centroid(m)),
                });
                if dump_every > 0 && s % dump_every == 0 {
                    rec["vertices"] = json!(m.vertices().iter().map(coords).collect::<Vec<_>>());
                }
                ndjson_line(out, &rec);
            };
            emit(&mut out, 0, 0.0, &mem);
            let result = evolve_membrane_with(&mem, run.dt, run.steps, |s, t, m| emit(&mut out, s, t, m));
            write_output(&run.out, &out)?;
            result.op(OP).map(|_| ())
        }
        Simulate::SheetFamily { run, dump_every } => {
            const OP: &str = "symplectic::sheet_family_binormal_step";
            check_stepping(&run, OP)?;
            let mut fib = load_geometry(&run.input)?.fibration().op("format::fibration")?;
            let mut out = String::new();
            for s in 0..=run.steps {
                if s > 0 {
                    match sheet_family_binormal_step(&fib, run.dt) {
                        Ok(next) => fib = next,
                        Err(e) => {
                            write_output(&run.out, &out)?;
                            return Err(e).op(OP);
                        }
                    }
                }
                let mut rec = json!({"step": s, "t": s as f64 * run.dt, "hamiltonian": fib.hamiltonian()});
                if dump_every > 0 && s % dump_every == 0 {
                    rec["fibers"] = json!(fib
                        .fibers()
                        .iter()
                        .map(|c| c.points().iter().map(coords).collect::<Vec<_>>())
                        .collect::<Vec<_>>());
                }
                ndjson_line(&mut out, &rec);
            }
            write_output(&run.out, &out)
        }
    }
}

/// A membrane file (triangles present) or a closed curve.
enum AnyCarrier {
    Membrane(vortex_core::geometry::DiscreteMembrane),
    Filament(VortexFilament),
}

fn load_carrier(path: &Path) -> CliResult<AnyCarrier> {
    let g = load_geometry(path)?;
    if g.triangles.is_empty() {
        let curve = g.curve().op("format::curve")?;
        Ok(AnyCarrier::Filament(VortexFilament::new(curve, g.strength.unwrap_or(1.0)).op("biotsavart::filament")?))
    } else {
        Ok(AnyCarrier::Membrane(g.membrane().op("format::membrane")?))
    }
}

fn check_ladder(decades: f64, count: usize, op: &'static str) -> CliResult<()> {
    if !(decades >= 1.0) || !decades.is_finite() {
        return Err(CliError::invalid(op, format!("--eps-decades must be at least 1, got {decades}")));
    }
    if count < 5 {
        return Err(CliError::invalid(op, format!("--eps-count must be at least 5, got {count}")));
    }
    Ok(())
}

fn lia_report(c: &impl Carrier, vertex: usize, decades: f64, count: usize) -> CliResult<Value> {
    const OP: &str = "biotsavart::lia_slope";
    if vertex >= c.vertex_count() {
        return Err(CliError::invalid(OP, format!("vertex {vertex} out of range ({} vertices)", c.vertex_count())));
    }
    let eps = eps_ladder(c.local_spacing(vertex), decades, count);
    let fit = lia_slope(c, vertex, &eps).op(OP)?;
    Ok(json!({
        "version": VERSION,
        "analysis": "lia-slope",
        "vertex": vertex,
        "eps": eps,
        "slope": coords(&fit.slope),
        "slope_norm": fit.slope.norm(),
        "intercept": coords(&fit.intercept),
        "direction_error_deg": fit.direction_error_deg,
        "c_n_estimate": fit.c_n_estimate,
        "fit_residual": fit.fit_residual,
        "mean_curvature": coords(&fit.mean_curvature),
    }))
}

fn energy_report(c: &impl Carrier, decades: f64, count: usize) -> CliResult<Value> {
    let eps = eps_ladder(c.spacing(), decades, count);
    let fit = energy_slope(c, &eps).op("energy::energy_slope")?;
    Ok(json!({
        "version": VERSION,
        "analysis": "energy-slope",
        "eps": fit.eps,
        "increments": fit.increments,
        "slope": fit.slope,
        "slope_per_volume": fit.slope_per_volume,
        "volume": c.volume(),
        "fit_residual": fit.fit_residual,
    }))
}

fn analyze(cmd: Analyze) -> CliResult<()> {
    match cmd {
        Analyze::LiaSlope { mesh, vertex, eps_decades, eps_count, out } => {
            check_ladder(eps_decades, eps_count, "biotsavart::lia_slope")?;
            let report = match load_carrier(&mesh)? {
                AnyCarrier::Membrane(m) => lia_report(&m, vertex, eps_decades, eps_count)?,
                AnyCarrier::Filament(f) => lia_report(&f, vertex, eps_decades, eps_count)?,
            };
            write_json(&out, &report)
        }
        Analyze::EnergySlope { mesh, eps_decades, eps_count, out } => {
            check_ladder(eps_decades, eps_count, "energy::energy_slope")?;
            let report = match load_carrier(&mesh)? {
                AnyCarrier::Membrane(m) => energy_report(&m, eps_decades, eps_count)?,
                AnyCarrier::Filament(f) => energy_report(&f, eps_decades, eps_count)?,
            };
            write_json(&out, &report)
        }
    }
}

fn form_report(form: &str, value: f64) -> Value {
    json!({"version": VERSION, "form": form, "value": value})
}

fn evaluate(cmd: Evaluate) -> CliResult<()> {
    match cmd {
        Evaluate::Mw(a) => {
            let g = load_geometry(&a.input)?;
            let dim = g.dim.or_else(|| g.vertices.first().map(|v| v.len())).unwrap_or(0);
            let f = format::parse_fields(&read_input(&a.fields)?, dim).op("format::parse_fields")?;
            let value = if g.triangles.is_empty() {
                let c = g.curve().op("format::curve")?;
                symplectic::mw_form_curve(&c, &f.v, &f.w).op("symplectic::mw_form_curve")?
            } else {
                let m = g.membrane().op("format::membrane")?;
                symplectic::mw_form_membrane(&m, &f.v, &f.w).op("symplectic::mw_form_membrane")?
            };
            write_json(&a.out, &form_report("mw", value))
        }
        Evaluate::Kk(a) => {
            let cfg = format::parse_vortices(&read_input(&a.input)?).op("format::parse_vortices")?;
            let f = format::parse_fields(&read_input(&a.fields)?, 2).op("format::parse_fields")?;
            let pts = |xs: &[Vector]| xs.iter().map(|x| [x[0], x[1]]).collect::<Vec<_>>();
            let value = symplectic::kk_form_points(&cfg, &pts(&f.v), &pts(&f.w)).op("symplectic::kk_form_points")?;
            write_json(&a.out, &form_report("kk", value))
        }
        Evaluate::SheetForm(a) => {
            let sheet = load_geometry(&a.input)?.sheet().op("format::sheet")?;
            let dim = sheet.mesh().ambient_dim();
            let f = format::parse_fields(&read_input(&a.fields)?, dim).op("format::parse_fields")?;
            let value = symplectic::sheet_form(&sheet, &f.v, &f.w).op("symplectic::sheet_form")?;
            write_json(&a.out, &form_report("sheet-form", value))
        }
        Evaluate::Pairing(a) => {
            let sheet = load_geometry(&a.input)?.sheet().op("format::sheet")?;
            let dim = sheet.mesh().ambient_dim();
            let f = format::parse_fields(&read_input(&a.fields)?, dim).op("format::parse_fields")?;
            if !f.w.is_empty() {
                return Err(CliError::invalid("symplectic::sheet_pairing", "pairing takes `V` lines only"));
            }
            let value = symplectic::sheet_pairing(&sheet, &f.v).op("symplectic::sheet_pairing")?;
            write_json(&a.out, &form_report("pairing", value))
        }
    }
}

fn positive(x: f64, name: &str) -> CliResult<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(CliError::invalid("fixtures::make_fixture", format!("--{name} must be positive, got {x}")));
    }
    Ok(())
}

fn at_least(x: usize, min: usize, name: &str) -> CliResult<()> {
    if x < min {
        return Err(CliError::invalid("fixtures::make_fixture", format!("--{name} must be at least {min}, got {x}")));
    }
    Ok(())
}

fn at_most(x: usize, max: usize, name: &str) -> CliResult<()> {
    if x > max {
        return Err(CliError::invalid("fixtures::make_fixture", format!("--{name} must be at most {max}, got {x}")));
    }
    Ok(())
}

fn fixture(cmd: Fixture) -> CliResult<()> {
    let (text, out) = match cmd {
        Fixture::Circle3d { n, radius, out } => {
            at_least(n, 3, "n")?;
            positive(radius, "radius")?;
            (format::write_curve(&fixtures::circle(n, radius, 3)), out)
        }
        Fixture::Icosphere4d { radius, level, strength, out } => {
            positive(radius, "radius")?;
            at_most(level as usize, 7, "level")?;
            if !strength.is_finite() || strength == 0.0 {
                return Err(CliError::invalid("fixtures::make_fixture", "--strength must be finite and nonzero"));
            }
            let m = fixtures::icosphere4d(radius, level).with_strength(strength);
            (format::write_membrane(&m), out)
        }
        Fixture::Flatpatch4d { side, cells, out } => {
            positive(side, "side")?;
            at_least(cells, 1, "cells")?;
            at_most(cells, 1024, "cells")?;
            (format::write_membrane(&fixtures::flatpatch4d(side, cells)), out)
        }
        Fixture::TorusBandSheet { width, nu, nv, out } => {
            positive(width, "width")?;
            at_least(nu, 3, "nu")?;
            at_least(nv, 3, "nv")?;
            (format::write_sheet(&fixtures::torus_band_sheet(width, nu, nv)), out)
        }
        Fixture::CylinderFibration { fibers, n, radius, df, out } => {
            at_least(fibers, 1, "fibers")?;
            at_least(n, 3, "n")?;
            positive(radius, "radius")?;
            positive(df, "df")?;
            (format::write_fibration(&fixtures::cylinder_fibration(fibers, n, radius, df)), out)
        }
        Fixture::RandomVortices { n, seed, out } => {
            at_least(n, 1, "n")?;
            at_most(n, 10_000, "n")?;
            (format::write_vortices(&fixtures::random_vortices(n, seed)), out)
        }
    };
    write_output(&out, &text)
}

fn check_json(r: &CheckReport) -> Value {
    let measured: serde_json::Map<String, Value> = r.measured.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({"name": r.name, "passed": r.passed, "measured": measured, "summary": r.summary})
}

fn check(cmd: Check) -> CliResult<()> {
    let (label, reports, out) = match cmd {
        Check::Invariants { fixture, out } => {
            let reports = checks::invariants(&fixture).op("checks::invariants")?;
            (format!("invariants {fixture}"), reports, out)
        }
        Check::Acceptance { criterion, out } => {
            let ids: Vec<usize> = match criterion {
                Some(id) => vec![id],
                None => (1..=checks::CRITERIA.len()).collect(),
            };
            let mut reports = Vec::new();
            for id in ids {
                let mut r = checks::criterion(id).op("checks::criterion")?;
                r.name = format!("{id}: {}", r.name);
                reports.push(r);
            }
            ("acceptance".to_string(), reports, out)
        }
    };
    let failed = reports.iter().filter(|r| !r.passed).count();
    write_json(
        &out,
        &json!({
            "version": VERSION,
            "suite": label,
            "passed": failed == 0,
            "checks": reports.iter().map(check_json).collect::<Vec<_>>(),
        }),
    )?;
    if failed > 0 {
        let names: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        return Err(CliError::numerical("checks::run", format!("{failed} failed: {}", names.join("; "))));
    }
    Ok(())
}
