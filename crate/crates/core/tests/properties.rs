//! Invariance and algebraic properties over randomized inputs.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use vortex_core::filament3d::binormal_velocity;
use vortex_core::fixtures;
use vortex_core::format::{parse_fields, parse_geometry, parse_vortices, write_curve, write_vortices};
use vortex_core::geometry::DiscreteCurve;
use vortex_core::membrane_flow::skew_mc_velocity;
use vortex_core::pointvortex2d::{impulses, kirchhoff_hamiltonian, kirchhoff_velocity, poisson_bracket, VortexConfig2D};
use vortex_core::symplectic::{kk_form_points, mw_form_curve, mw_form_membrane, sheet_form, sheet_pairing, VortexSheet};
use vortex_core::{vector, Vector};

/// Proper rotation from a seed matrix via QR.
fn rotation(seed: &[f64], n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_row_slice(n, n, seed) + DMatrix::identity(n, n) * 0.1;
    let mut q = a.qr().q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

fn small_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn wobbly_curve(amp: &[f64]) -> DiscreteCurve {
    let pts = (0..96)
        .map(|i| {
            let s = 2.0 * PI * i as f64 / 96.0;
            vector(&[
                s.cos() * (1.0 + 0.2 * amp[0] * (2.0 * s).cos()),
                s.sin() * (1.0 + 0.2 * amp[1] * (3.0 * s).sin()),
                0.3 * amp[2] * (2.0 * s).sin(),
            ])
        })
        .collect();
    DiscreteCurve::closed(pts).unwrap()
}

fn max_diff(a: &[Vector], b: &[Vector]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn membrane_flow_is_rotation_and_translation_equivariant(seed in small_vec(16), shift in small_vec(4)) {
        let m = fixtures::icosphere4d(1.0, 2);
        let r = rotation(&seed, 4);
        let t = Vector::from_vec(shift);
        let moved = m.with_vertices(m.vertices().iter().map(|x| &r * x + &t).collect()).unwrap();
        let v = skew_mc_velocity(&m).unwrap();
        let rv: Vec<Vector> = v.iter().map(|x| &r * x).collect();
        prop_assert!(max_diff(&skew_mc_velocity(&moved).unwrap(), &rv) < 1e-9);
    }

    #[test]
    fn binormal_flow_is_equivariant_and_scales(seed in small_vec(9), amp in small_vec(3), lambda in 0.3f64..3.0) {
        let c = wobbly_curve(&amp);
        let r = rotation(&seed, 3);
        let v = binormal_velocity(&c).unwrap();
        let rc = c.with_points(c.points().iter().map(|x| &r * x).collect()).unwrap();
        let rv: Vec<Vector> = v.iter().map(|x| &r * x).collect();
        prop_assert!(max_diff(&binormal_velocity(&rc).unwrap(), &rv) < 1e-9);
        let sv: Vec<Vector> = v.iter().map(|x| x / lambda).collect();
        prop_assert!(max_diff(&binormal_velocity(&c.scaled(lambda)).unwrap(), &sv) < 1e-9);
    }

    #[test]
    fn mw_curve_form_is_rotation_invariant(seed in small_vec(9), amp in small_vec(3), fields in small_vec(6)) {
        let c = wobbly_curve(&amp);
        let r = rotation(&seed, 3);
        let v: Vec<Vector> = (0..c.len()).map(|i| vector(&[fields[0], fields[1] * (i as f64).cos(), fields[2]])).collect();
        let w: Vec<Vector> = (0..c.len()).map(|i| vector(&[fields[3] * (i as f64).sin(), fields[4], fields[5]])).collect();
        let a = mw_form_curve(&c, &v, &w).unwrap();
        let rc = c.with_points(c.points().iter().map(|x| &r * x).collect()).unwrap();
        let rv: Vec<Vector> = v.iter().map(|x| &r * x).collect();
        let rw: Vec<Vector> = w.iter().map(|x| &r * x).collect();
        prop_assert!((mw_form_curve(&rc, &rv, &rw).unwrap() - a).abs() < 1e-10);
        prop_assert!((mw_form_curve(&c, &v, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mw_membrane_form_is_bilinear(a in -3.0f64..3.0, b in -3.0f64..3.0, fields in small_vec(12)) {
        let m = fixtures::icosphere4d(1.0, 1);
        let f = |k: usize| -> Vec<Vector> {
            m.vertices().iter().map(|x| vector(&[fields[k] * x[1], fields[k + 1], fields[k + 2] * x[0], fields[k + 3]])).collect()
        };
        let (u, v, w) = (f(0), f(4), f(8));
        let comb: Vec<Vector> = u.iter().zip(&v).map(|(x, y)| x * a + y * b).collect();
        let lhs = mw_form_membrane(&m, &comb, &w).unwrap();
        let rhs = a * mw_form_membrane(&m, &u, &w).unwrap() + b * mw_form_membrane(&m, &v, &w).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        prop_assert!((mw_form_membrane(&m, &u, &w).unwrap() + mw_form_membrane(&m, &w, &u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sheet_form_ignores_potential_shift(shift in -10.0f64..10.0, fields in small_vec(6)) {
        let sheet = fixtures::sphere_band_sheet(0.3, 10, 16);
        let n = sheet.mesh().vertex_count();
        let v: Vec<Vector> = (0..n).map(|i| vector(&[fields[0], fields[1] * (i as f64).sin(), fields[2]])).collect();
        let w: Vec<Vector> = (0..n).map(|i| vector(&[fields[3] * (i as f64).cos(), fields[4], fields[5]])).collect();
        let a = sheet_form(&sheet, &v, &w).unwrap();
        let b = sheet_form(&sheet.shifted(shift).unwrap(), &v, &w).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn kirchhoff_invariants_commute_with_hamiltonian(seed in 0u64..1000) {
        let cfg = fixtures::random_vortices(5, seed);
        // {H, Px} = {H, Py} = {H, I} = 0 via the vortex Poisson bracket.
        let vel = kirchhoff_velocity(&cfg).unwrap();
        let k = cfg.strengths();
        let grad_h: Vec<[f64; 2]> = vel.iter().zip(k).map(|(u, k)| [-k * u[1], k * u[0]]).collect();
        let grad_px: Vec<[f64; 2]> = k.iter().map(|k| [0.0, *k]).collect();
        let grad_i: Vec<[f64; 2]> = cfg.positions().iter().zip(k).map(|(p, k)| [2.0 * k * p[0], 2.0 * k * p[1]]).collect();
        let scale = grad_h.iter().map(|g| g[0].abs() + g[1].abs()).sum::<f64>();
        prop_assert!(poisson_bracket(&cfg, &grad_h, &grad_px).unwrap().abs() < 1e-10 * scale);
        prop_assert!(poisson_bracket(&cfg, &grad_h, &grad_i).unwrap().abs() < 1e-10 * scale);
    }

    #[test]
    fn kirchhoff_hamiltonian_is_isometry_invariant(seed in 0u64..1000, angle in 0.0f64..6.3, dx in -2.0f64..2.0) {
        let cfg = fixtures::random_vortices(4, seed);
        let (c, s) = (angle.cos(), angle.sin());
        let moved: Vec<[f64; 2]> = cfg.positions().iter().map(|p| [c * p[0] - s * p[1] + dx, s * p[0] + c * p[1]]).collect();
        let other = cfg.with_positions(moved).unwrap();
        let (h0, h1) = (kirchhoff_hamiltonian(&cfg).unwrap(), kirchhoff_hamiltonian(&other).unwrap());
        prop_assert!((h0 - h1).abs() < 1e-12 * (1.0 + h0.abs()));
        let (_, _, i0) = impulses(&cfg);
        let (_, _, i1) = impulses(&other.with_positions(other.positions().iter().map(|p| [p[0] - dx, p[1]]).collect()).unwrap());
        prop_assert!((i0 - i1).abs() < 1e-10 * (1.0 + i0.abs()));
    }

    #[test]
    fn kk_form_is_antisymmetric(seed in 0u64..1000, fields in small_vec(12)) {
        let cfg = fixtures::random_vortices(3, seed);
        let v: Vec<[f64; 2]> = fields[..6].chunks(2).map(|c| [c[0], c[1]]).collect();
        let w: Vec<[f64; 2]> = fields[6..].chunks(2).map(|c| [c[0], c[1]]).collect();
        let a = kk_form_points(&cfg, &v, &w).unwrap();
        prop_assert!((a + kk_form_points(&cfg, &w, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn parsers_never_panic(text in "(?s).{0,200}") {
        let _ = parse_geometry(&text);
        let _ = parse_vortices(&text);
        let _ = parse_fields(&text, 3);
    }

    #[test]
    fn vortex_files_round_trip(seed in 0u64..1000, n in 1usize..8) {
        let cfg = fixtures::random_vortices(n, seed);
        let back = parse_vortices(&write_vortices(&cfg)).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn curve_files_round_trip(amp in small_vec(3)) {
        let c = wobbly_curve(&amp);
        let back = parse_geometry(&write_curve(&c)).unwrap().curve().unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn edge_values_detect_non_closed_alpha() {
    let mesh = fixtures::icosphere(1.0, 1, 3);
    let f: Vec<f64> = mesh.vertices().iter().map(|x| x[0] * x[2]).collect();
    let sheet = VortexSheet::exact(mesh.clone(), f).unwrap();
    let mut values: Vec<(usize, usize, f64)> = mesh
        .edges()
        .iter()
        .map(|&(i, j)| (i, j, sheet.alpha_on(i, j)))
        .collect();
    assert!(VortexSheet::from_edge_values(mesh.clone(), &values).is_ok());
    values[0].2 += 0.1;
    assert!(VortexSheet::from_edge_values(mesh, &values).is_err());
}

#[test]
fn vortex_config_rejects_mismatch() {
    assert!(VortexConfig2D::new(vec![[0.0, 0.0]], vec![1.0, 2.0]).is_err());
}

#[test]
fn pairing_gauge_shift_adds_flux() {
    let mesh = fixtures::icosphere(1.0, 2, 3);
    let f: Vec<f64> = mesh.vertices().iter().map(|x| x[0] + x[1] * x[2]).collect();
    let sheet = VortexSheet::exact(mesh.clone(), f).unwrap();
    let v: Vec<Vector> = (0..mesh.triangle_count())
        .map(|t| {
            let c = mesh.triangle_centroid(t);
            vector(&[1.0 + c[1], c[0] * c[2], 0.5 - c[0]])
        })
        .collect();
    let ones = VortexSheet::exact(mesh.clone(), vec![1.0; mesh.vertex_count()]).unwrap();
    let flux = sheet_pairing(&ones, &v).unwrap();
    let shift = 2.5;
    let delta = sheet_pairing(&sheet.shifted(shift).unwrap(), &v).unwrap() - sheet_pairing(&sheet, &v).unwrap();
    assert!((delta - shift * flux).abs() < 1e-12, "{delta} vs {}", shift * flux);
}
