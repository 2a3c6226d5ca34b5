//! Closed-form and conservation-law oracles that are independent of the
//! code paths under test.

use std::f64::consts::PI;

use vortex_core::biotsavart::{eps_ladder, green_gradient, lia_slope, Carrier, MembraneQuadrature};
use vortex_core::energy::energy_slope;
use vortex_core::fixtures;
use vortex_core::geometry::{membrane_mean_curvature, membrane_normal_frame, membrane_volume, DiscreteMembrane};
use vortex_core::membrane_flow::skew_mc_velocity;
use vortex_core::{vector, Vector};

/// Midpoint rule on the radius-`r` 3-sphere around `c` in Hopf coordinates
/// (uniform in `sin²η`, which makes the measure constant), integrating
/// `f(x, outward normal)`.
fn s3_integral(c: &Vector, r: f64, m: usize, mut f: impl FnMut(&Vector, &Vector) -> f64) -> f64 {
    let (du, dx) = (1.0 / m as f64, 2.0 * PI / (2 * m) as f64);
    let mut total = 0.0;
    for i in 0..m {
        let eta = ((i as f64 + 0.5) * du).sqrt().asin();
        for j in 0..2 * m {
            let x1 = (j as f64 + 0.5) * dx;
            for k in 0..2 * m {
                let x2 = (k as f64 + 0.25) * dx;
                let n = vector(&[x1.cos() * eta.sin(), x1.sin() * eta.sin(), x2.cos() * eta.cos(), x2.sin() * eta.cos()]);
                let x = c + &n * r;
                total += f(&x, &n) * r.powi(3) * 0.5 * du * dx * dx;
            }
        }
    }
    total
}

#[test]
fn green_flux_is_unit() {
    // n = 3 on a fine icosphere, n = 4 on S³.
    let q = vector(&[0.1, -0.2, 0.3]);
    let s = fixtures::icosphere(0.7, 5, 3);
    let mut flux = 0.0;
    for t in 0..s.triangle_count() {
        let x = s.triangle_centroid(t);
        let n = x.normalize();
        flux += s.triangle_area(t) * green_gradient(3, q.as_slice(), (&x + &q).as_slice()).unwrap().dot(&n);
    }
    assert!((flux - 1.0).abs() < 2e-3, "{flux}");

    let q4 = vector(&[0.3, 0.0, -0.1, 0.2]);
    let flux4 = s3_integral(&q4, 0.5, 16, |x, n| green_gradient(4, q4.as_slice(), x.as_slice()).unwrap().dot(n));
    assert!((flux4 - 1.0).abs() < 1e-6, "{flux4}");
}

#[test]
fn membrane_velocity_is_divergence_free() {
    // Zero flux through spheres that avoid the membrane, whether or not
    // they enclose part of it.
    let m = fixtures::icosphere4d(1.0, 3);
    let quad = MembraneQuadrature::new(&m).unwrap();
    let scale = quad.velocity(&[0.0, 0.0, 0.0, 0.5]).unwrap().norm();
    for (c, r) in [(vector(&[0.0; 4]), 0.5), (vector(&[1.0, 0.0, 0.0, 0.0]), 0.3), (vector(&[0.0, 0.0, 0.0, 1.5]), 0.6)] {
        let flux = s3_integral(&c, r, 10, |x, n| quad.velocity(x.as_slice()).unwrap().dot(n));
        assert!(flux.abs() < 1e-3 * scale.max(1.0), "center {c:?}: {flux}");
    }
}

#[test]
fn membrane_far_field_decays() {
    let m = fixtures::icosphere4d(1.0, 3);
    let quad = MembraneQuadrature::new(&m).unwrap();
    let dir = vector(&[0.3, -0.5, 0.2, 0.8]).normalize();
    let v1 = quad.velocity((&dir * 20.0).as_slice()).unwrap().norm();
    let v2 = quad.velocity((&dir * 40.0).as_slice()).unwrap().norm();
    // A closed membrane looks like a dipole: |v| ~ r⁻⁴ in R⁴.
    let rate = (v1 / v2).log2();
    assert!((rate - 4.0).abs() < 0.1, "{rate}");
}

#[test]
fn icosphere_area_and_curvature() {
    let m = fixtures::icosphere4d(1.0, 4);
    assert!((membrane_volume(&m) / (4.0 * PI) - 1.0).abs() < 5e-3);
    let worst = (0..m.vertex_count())
        .map(|v| (membrane_mean_curvature(&m, v).unwrap().norm() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-2, "{worst}");
}

/// Mean curvature of `Σ xᵢ²/aᵢ² = 1` at a point on it.
fn ellipsoid_mean_curvature(a: [f64; 3], x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|t| t * t).sum();
    let s: f64 = (0..3).map(|i| x[i] * x[i] / a[i].powi(4)).sum();
    let abc2 = (a[0] * a[1] * a[2]).powi(2);
    (r2 - a.iter().map(|t| t * t).sum::<f64>()).abs() / (2.0 * abc2 * s.powf(1.5))
}

#[test]
fn ellipsoid_mean_curvature_matches_closed_form() {
    // Directional average of normal curvatures, i.e. (κ₁ + κ₂)/2, from the
    // implicit surface.
    let axes = [1.3, 1.0, 0.7];
    let mesh = fixtures::ellipsoid(axes, 5, 4);
    let mut sum = 0.0;
    let mut worst: f64 = 0.0;
    for v in 0..mesh.vertex_count() {
        let exact = ellipsoid_mean_curvature(axes, &mesh.vertex(v).as_slice()[..3]);
        let err = (membrane_mean_curvature(&mesh, v).unwrap().norm() - exact).abs() / exact;
        sum += err;
        worst = worst.max(err);
    }
    let mean = sum / mesh.vertex_count() as f64;
    assert!(mean < 5e-3 && worst < 5e-2, "mean {mean}, worst {worst}");
}

#[test]
fn ellipsoid_flow_speed_equals_mean_curvature() {
    let axes = [1.3, 1.0, 0.7];
    let m = DiscreteMembrane::new(fixtures::ellipsoid(axes, 3, 4), 1.0).unwrap();
    let vel = skew_mc_velocity(&m).unwrap();
    for (v, u) in vel.iter().enumerate() {
        // The flow rotates the normal part of MC by a quarter turn.
        let mc = membrane_normal_frame(&m, v).unwrap().project(membrane_mean_curvature(&m, v).unwrap().as_slice());
        assert!((u.norm() - mc.norm()).abs() < 1e-12);
        assert!(u.dot(&mc).abs() < 1e-12);
    }
}

#[test]
fn lia_direction_on_ellipsoid_improves_with_refinement() {
    let axes = [1.3, 1.0, 0.7];
    let mut errs = Vec::new();
    for level in [4, 5] {
        let m = DiscreteMembrane::new(fixtures::ellipsoid(axes, level, 4), 1.0).unwrap();
        // Same physical radii on both meshes.
        let h = fixtures::ellipsoid(axes, 4, 4).local_spacing(7);
        let fit = lia_slope(&m, 7, &eps_ladder(h, 1.0, 7)).unwrap();
        errs.push(fit.direction_error_deg.unwrap());
    }
    assert!(errs[1] < 5.0, "{errs:?}");
    assert!(errs[1] <= errs[0] + 0.5, "{errs:?}");
}

#[test]
fn flat_patch_has_no_lia_slope() {
    let m = fixtures::flatpatch4d(2.0, 64);
    let center = 32 * 65 + 32;
    let fit = lia_slope(&m, center, &eps_ladder(m.local_spacing(center), 1.0, 6)).unwrap();
    assert!(fit.slope.norm() < 1e-10, "{}", fit.slope);
    assert!(fit.direction_error_deg.is_none());
}

#[test]
fn flat_patch_energy_is_local() {
    // slope(L) = L²/(4π) − c·4L for square patches, so the boundary term
    // cancels in slope(2) − 2·slope(1).
    let (small, large) = (fixtures::flatpatch4d(1.0, 64), fixtures::flatpatch4d(2.0, 128));
    let eps = eps_ladder(small.spacing().max(large.spacing()), 1.0, 6);
    let s1 = energy_slope(&small, &eps).unwrap().slope;
    let s2 = energy_slope(&large, &eps).unwrap().slope;
    let bulk = s2 - 2.0 * s1;
    let target = 1.0 / (2.0 * PI);
    assert!((bulk - target).abs() < 0.05 * target, "{bulk} vs {target}");
}

#[test]
fn energy_slope_scales_with_area() {
    let eps1 = eps_ladder(fixtures::icosphere4d(1.0, 4).spacing(), 1.0, 6);
    let s1 = energy_slope(&fixtures::icosphere4d(1.0, 4), &eps1).unwrap().slope;
    let eps3 = eps_ladder(fixtures::icosphere4d(3.0, 4).spacing(), 1.0, 6);
    let s3 = energy_slope(&fixtures::icosphere4d(3.0, 4), &eps3).unwrap().slope;
    assert!((s3 / s1 - 9.0).abs() < 0.1, "{}", s3 / s1);
}

/// Curvature vector of the ellipsoid as the average of normal-section
/// curvature vectors `II(u, u)` over `k` tangent directions, using only
/// the implicit function.
fn ellipsoid_curvature_by_directions(a: [f64; 3], x: &[f64], k: usize) -> Vector {
    let g = Vector::from_iterator(3, (0..3).map(|i| 2.0 * x[i] / (a[i] * a[i])));
    let n = g.normalize();
    let seed = if n[0].abs() < 0.9 { vector(&[1.0, 0.0, 0.0]) } else { vector(&[0.0, 1.0, 0.0]) };
    let t1 = (&seed - &n * seed.dot(&n)).normalize();
    let t2 = vector(&[n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2], n[0] * t1[1] - n[1] * t1[0]]);
    let mut kappa = 0.0;
    for j in 0..k {
        let th = 2.0 * PI * j as f64 / k as f64;
        let u = &t1 * th.cos() + &t2 * th.sin();
        kappa += (0..3).map(|i| 2.0 * u[i] * u[i] / (a[i] * a[i])).sum::<f64>();
    }
    let mc = -&n * (kappa / k as f64 / g.norm());
    Vector::from_iterator(4, mc.iter().copied().chain([0.0]))
}

#[test]
fn mean_curvature_matches_direction_average() {
    for (axes, level, tol) in [([1.0, 1.0, 1.0], 4, 0.03), ([1.3, 1.0, 0.7], 5, 0.05)] {
        let mesh = fixtures::ellipsoid(axes, level, 4);
        for v in 0..mesh.vertex_count() {
            let exact = ellipsoid_curvature_by_directions(axes, &mesh.vertex(v).as_slice()[..3], 64);
            let mc = membrane_mean_curvature(&mesh, v).unwrap();
            assert!(mc[3].abs() < 1e-10);
            assert!((&mc - &exact).norm() < tol * exact.norm(), "{axes:?} vertex {v}: {mc} vs {exact}");
        }
    }
}
