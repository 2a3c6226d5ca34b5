//! Deterministic test objects: circles, icospheres, flat patches, banded
//! sheets, fibrations and seeded point-vortex clouds.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{DiscreteCurve, DiscreteMembrane, TriMesh};
use crate::pointvortex2d::VortexConfig2D;
use crate::symplectic::{SheetFibration, VortexSheet};
use crate::Vector;

fn embed(xs: &[f64], dim: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    for (k, x) in xs.iter().enumerate().take(dim) {
        v[k] = *x;
    }
    v
}

/// Regular `n`-gon of radius `radius` in the (x₁, x₂)-plane of R^dim,
/// counterclockwise seen from +x₃.
pub fn circle(n: usize, radius: f64, dim: usize) -> DiscreteCurve {
    assert!(dim >= 2);
    let pts = (0..n)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64;
            embed(&[radius * th.cos(), radius * th.sin()], dim)
        })
        .collect();
    DiscreteCurve::closed(pts).expect("circle fixture")
}

/// Unit circle in R³ with `n` vertices.
pub fn circle3d(n: usize) -> DiscreteCurve {
    circle(n, 1.0, 3)
}

/// Open helix `(a cos s, a sin s, c s)` sampled at `n` points over `turns`
/// turns.
pub fn helix(a: f64, c: f64, turns: f64, n: usize) -> DiscreteCurve {
    let pts = (0..n)
        .map(|i| {
            let s = 2.0 * PI * turns * i as f64 / (n - 1) as f64;
            crate::vector(&[a * s.cos(), a * s.sin(), c * s])
        })
        .collect();
    DiscreteCurve::new(pts, false).expect("helix fixture")
}

/// Icosphere of radius `r` subdivided `level` times, in the first three
/// coordinates of R^dim. Triangles are wound counterclockwise seen from
/// outside, so with the orientation rule of [`crate::geometry::NormalFrame`]
/// a sphere in R³×{0} ⊂ R⁴ moves toward +x₄ under the skew-mean-curvature
/// flow.
pub fn icosphere(r: f64, level: u32, dim: usize) -> TriMesh {
    assert!(dim >= 3);
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let normalize = |p: [f64; 3]| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / n, p[1] / n, p[2] / n]
    };
    for v in verts.iter_mut() {
        *v = normalize(*v);
    }
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let vs = verts
        .iter()
        .map(|p| embed(&[r * p[0], r * p[1], r * p[2]], dim))
        .collect();
    TriMesh::new(vs, tris).expect("icosphere fixture")
}

/// Unit-strength icosphere membrane in R⁴.
pub fn icosphere4d(r: f64, level: u32) -> DiscreteMembrane {
    DiscreteMembrane::new(icosphere(r, level, 4), 1.0).expect("finite strength")
}

/// Icosphere stretched to semi-axes `axes` along x₁, x₂, x₃, in R^dim.
pub fn ellipsoid(axes: [f64; 3], level: u32, dim: usize) -> TriMesh {
    icosphere(1.0, level, dim)
        .map_vertices(|v| {
            let mut w = v.clone();
            for k in 0..3 {
                w[k] *= axes[k];
            }
            w
        })
        .expect("same dimension")
}

/// Square `[-side/2, side/2]²` in the (x₁, x₂)-plane of R^dim split into
/// `cells × cells` squares, each cut into two counterclockwise triangles.
/// Vertex `(i, j)` has index `j·(cells+1) + i`. The mesh is open.
pub fn flat_patch(side: f64, cells: usize, dim: usize) -> TriMesh {
    let n = cells + 1;
    let h = side / cells as f64;
    let mut vs = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            vs.push(embed(
                &[-side / 2.0 + i as f64 * h, -side / 2.0 + j as f64 * h],
                dim,
            ));
        }
    }
    let mut tris = Vec::with_capacity(2 * cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            let a = j * n + i;
            let (b, c, d) = (a + 1, a + n + 1, a + n);
            // Alternate the diagonal so the patch has no preferred direction.
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    TriMesh::new(vs, tris).expect("flat patch fixture")
}

/// Unit-strength flat patch membrane in R⁴.
pub fn flatpatch4d(side: f64, cells: usize) -> DiscreteMembrane {
    DiscreteMembrane::new(flat_patch(side, cells, 4), 1.0).expect("finite strength")
}

/// Latitude-longitude sphere of radius 1 in R³ with `n_lat` rings of
/// triangles between the poles and `n_lon` vertices per ring. With `n_lat`
/// even the equator is a vertex ring. Outward winding.
pub fn uv_sphere(n_lat: usize, n_lon: usize) -> TriMesh {
    assert!(n_lat >= 2 && n_lon >= 3);
    let mut vs = vec![crate::vector(&[0.0, 0.0, 1.0])];
    for k in 1..n_lat {
        let th = PI * k as f64 / n_lat as f64;
        for m in 0..n_lon {
            let ph = 2.0 * PI * m as f64 / n_lon as f64;
            vs.push(crate::vector(&[th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]));
        }
    }
    vs.push(crate::vector(&[0.0, 0.0, -1.0]));
    let south = vs.len() - 1;
    let ring = |k: usize, m: usize| 1 + (k - 1) * n_lon + m % n_lon;
    let mut tris = Vec::new();
    for m in 0..n_lon {
        tris.push([0, ring(1, m), ring(1, m + 1)]);
    }
    for k in 1..n_lat - 1 {
        for m in 0..n_lon {
            let (a, b) = (ring(k, m), ring(k, m + 1));
            let (c, d) = (ring(k + 1, m), ring(k + 1, m + 1));
            tris.push([a, c, d]);
            tris.push([a, d, b]);
        }
    }
    for m in 0..n_lon {
        tris.push([south, ring(n_lat - 1, m + 1), ring(n_lat - 1, m)]);
    }
    TriMesh::new(vs, tris).expect("uv sphere fixture")
}

/// C¹ step rising from 0 at `s = -1/2` to 1 at `s = 1/2`.
pub fn smooth_step(s: f64) -> f64 {
    let t = (s + 0.5).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Unit sphere carrying the exact sheet `α = df` with `f = step(z / width)`:
/// a band of total transverse weight 1 around the equator, so that the
/// sheet degenerates to the equatorial filament as `width → 0`.
pub fn sphere_band_sheet(width: f64, n_lat: usize, n_lon: usize) -> VortexSheet {
    let mesh = uv_sphere(n_lat, n_lon);
    let f = mesh.vertices().iter().map(|v| smooth_step(v[2] / width)).collect();
    VortexSheet::exact(mesh, f).expect("band sheet fixture")
}

/// Torus with radii `big`, `small` about the x₃ axis, `nu × nv` quads.
pub fn torus(big: f64, small: f64, nu: usize, nv: usize) -> TriMesh {
    let mut vs = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            let rho = big + small * v.cos();
            vs.push(crate::vector(&[rho * u.cos(), rho * u.sin(), small * v.sin()]));
        }
    }
    let idx = |i: usize, j: usize| (i % nu) * nv + j % nv;
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    TriMesh::new(vs, tris).expect("torus fixture")
}

/// Torus carrying the exact band sheet `f = step(x₃ / width)`.
pub fn torus_band_sheet(width: f64, nu: usize, nv: usize) -> VortexSheet {
    let mesh = torus(1.0, 0.4, nu, nv);
    let f = mesh.vertices().iter().map(|v| smooth_step(v[2] / width)).collect();
    VortexSheet::exact(mesh, f).expect("torus sheet fixture")
}

/// `fibers` coaxial circles of radius `radius` with `n` vertices each,
/// stacked along x₃ at spacing `df` starting from 0.
pub fn cylinder_fibration(fibers: usize, n: usize, radius: f64, df: f64) -> SheetFibration {
    let curves = (0..fibers)
        .map(|k| {
            circle(n, radius, 3).translated(&crate::vector(&[0.0, 0.0, k as f64 * df]))
        })
        .collect();
    SheetFibration::new(curves, df).expect("fibration fixture")
}

/// `n` vortices uniform in `[-1, 1]²`, strengths of random sign with
/// magnitude in `[0.5, 1.5]`, pairwise separation at least
/// `min(0.3, 0.5/√n)`.
pub fn random_vortices(n: usize, seed: u64) -> VortexConfig2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = Vec::with_capacity(n);
    let sep = 0.3f64.min(0.5 / (n as f64).sqrt());
    while pos.len() < n {
        let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if pos
            .iter()
            .all(|q: &[f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]) >= sep)
        {
            pos.push(p);
        }
    }
    let kappa = (0..n)
        .map(|_| {
            let m: f64 = rng.gen_range(0.5..1.5);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    VortexConfig2D::new(pos, kappa).expect("random vortex fixture")
}
