//! Binormal flow `∂ₜγ = k·b` of closed space curves, and the Hasimoto map.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::geometry::{curve_curvature_vector, curve_length, unit_tangent, DiscreteCurve};
use crate::linalg;
use crate::Vector;

fn require_closed_3d(curve: &DiscreteCurve) -> Result<()> {
    if curve.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: curve.ambient_dim(),
        });
    }
    if !curve.is_closed() {
        return Err(Error::invalid("the binormal flow needs a closed curve"));
    }
    Ok(())
}

/// Per-vertex velocity `t × (k n) = k b`. Vertices with collinear
/// neighbors get zero velocity.
pub fn binormal_velocity(curve: &DiscreteCurve) -> Result<Vec<Vector>> {
    require_closed_3d(curve)?;
    (0..curve.len())
        .map(|i| {
            let kn = curve_curvature_vector(curve, i)?;
            let t = unit_tangent(curve, i)?;
            Ok(linalg::cross3(t.as_slice(), kn.as_slice()))
        })
        .collect()
}

/// One classical Runge–Kutta step of the binormal flow.
pub fn rk4_step(curve: &DiscreteCurve, dt: f64) -> Result<DiscreteCurve> {
    if dt == 0.0 {
        return Ok(curve.clone());
    }
    let x0 = curve.points();
    let shifted = |k: &[Vector], a: f64| -> Result<DiscreteCurve> {
        curve.with_points(x0.iter().zip(k).map(|(x, v)| x + v * a).collect())
    };
    let k1 = binormal_velocity(curve)?;
    let k2 = binormal_velocity(&shifted(&k1, dt / 2.0)?)?;
    let k3 = binormal_velocity(&shifted(&k2, dt / 2.0)?)?;
    let k4 = binormal_velocity(&shifted(&k3, dt)?)?;
    let pts = (0..x0.len())
        .map(|i| &x0[i] + (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (dt / 6.0))
        .collect();
    curve.with_points(pts)
}

/// Resamples a closed curve to the same number of vertices equally spaced
/// in arclength, starting at vertex 0.
pub fn resample_uniform(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    let pts = curve.points();
    let m = pts.len();
    let edge_len: Vec<f64> = curve
        .edges()
        .map(|(i, j)| linalg::dist(pts[i].as_slice(), pts[j].as_slice()))
        .collect();
    let total: f64 = edge_len.iter().sum();
    let step = total / m as f64;
    let mut out = Vec::with_capacity(m);
    let mut e = 0;
    let mut start = 0.0;
    for k in 0..m {
        let s = k as f64 * step;
        while e + 1 < edge_len.len() && start + edge_len[e] < s {
            start += edge_len[e];
            e += 1;
        }
        let (i, j) = (e, (e + 1) % m);
        let t = ((s - start) / edge_len[e]).clamp(0.0, 1.0);
        out.push(&pts[i] + (&pts[j] - &pts[i]) * t);
    }
    curve.with_points(out)
}

/// Closest distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_distance(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64]) -> f64 {
    let d1 = linalg::sub(p1, p0);
    let d2 = linalg::sub(q1, q0);
    let r = linalg::sub(p0, q0);
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    let (c, b) = (d1.dot(&r), d1.dot(&d2));
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = if e > 0.0 { (b * s + f) / e } else { 0.0 };
    if t < 0.0 {
        t = 0.0;
        s = if a > 0.0 { (-c / a).clamp(0.0, 1.0) } else { 0.0 };
    } else if t > 1.0 {
        t = 1.0;
        s = if a > 0.0 { ((b - c) / a).clamp(0.0, 1.0) } else { 0.0 };
    }
    (r + d1 * s - d2 * t).norm()
}

/// Smallest distance between non-adjacent segments, with their indices.
pub fn closest_nonadjacent_segments(curve: &DiscreteCurve) -> Option<(usize, usize, f64)> {
    let pts = curve.points();
    let edges: Vec<(usize, usize)> = curve.edges().collect();
    let m = edges.len();
    let mut best: Option<(usize, usize, f64)> = None;
    for a in 0..m {
        for b in a + 2..m {
            if curve.is_closed() && a == 0 && b == m - 1 {
                continue;
            }
            let (i0, i1) = edges[a];
            let (j0, j1) = edges[b];
            let d = segment_distance(
                pts[i0].as_slice(),
                pts[i1].as_slice(),
                pts[j0].as_slice(),
                pts[j1].as_slice(),
            );
            if best.is_none_or(|(_, _, bd)| d < bd) {
                best = Some((a, b, d));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Default)]
pub struct FilamentOptions {
    /// Resample to uniform arclength every this many steps.
    pub resample_every: Option<usize>,
    /// Halt when two non-adjacent segments come closer than this fraction
    /// of the mean edge length.
    pub self_intersection_fraction: Option<f64>,
}

/// `dt ≤ STABILITY_FACTOR·h²` keeps explicit RK4 stable on a curve with
/// edge length `h`.
pub const STABILITY_FACTOR: f64 = 0.7;

/// Evolves the curve by `steps` RK4 steps of size `dt`; returns the final
/// curve and the length after every step (index 0 is the initial length).
pub fn evolve_filament(curve: &DiscreteCurve, dt: f64, steps: usize) -> Result<(DiscreteCurve, Vec<f64>)> {
    evolve_filament_with(curve, dt, steps, &FilamentOptions::default(), |_, _, _| {})
}

/// [`evolve_filament`] with resampling/self-intersection options and an
/// observer called as `observer(step, t, curve)` after every step.
pub fn evolve_filament_with(
    curve: &DiscreteCurve,
    dt: f64,
    steps: usize,
    opts: &FilamentOptions,
    mut observer: impl FnMut(usize, f64, &DiscreteCurve),
) -> Result<(DiscreteCurve, Vec<f64>)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    require_closed_3d(curve)?;
    // Linearized, the flow is dispersive with eigenvalues up to ~4i/h²; RK4
    // covers the imaginary axis to 2√2.
    let h = curve.mean_edge_length();
    let dt_max = STABILITY_FACTOR * h * h;
    if dt > dt_max {
        log::warn!("filament3d::evolve_filament: dt = {dt:.2e} exceeds the stability bound {dt_max:.2e} for spacing {h:.3e}");
    }
    let mut cur = curve.clone();
    let mut lengths = Vec::with_capacity(steps + 1);
    lengths.push(curve_length(&cur));
    for s in 1..=steps {
        cur = rk4_step(&cur, dt)?;
        if let Some(k) = opts.resample_every {
            if k > 0 && s % k == 0 {
                cur = resample_uniform(&cur)?;
                log::info!("filament3d::evolve_filament: resampled at step {s}");
            }
        }
        if let Some(frac) = opts.self_intersection_fraction {
            let tol = frac * cur.mean_edge_length();
            if let Some((a, b, d)) = closest_nonadjacent_segments(&cur) {
                if d < tol {
                    return Err(Error::TopologyChange(a, b, d));
                }
            }
        }
        lengths.push(curve_length(&cur));
        observer(s, s as f64 * dt, &cur);
    }
    Ok((cur, lengths))
}

/// Hasimoto wave function `ψ = k·exp(i∫τ ds)` with the phase fixed to 0
/// at the first reported vertex. Closed curves report every vertex; open
/// curves report the interior vertices `1..len-1` (entry `i` belongs to
/// vertex `i + 1`).
///
/// Torsion is the signed turning angle of consecutive osculating-plane
/// binormals around the shared edge, per unit arclength.
pub fn hasimoto(curve: &DiscreteCurve) -> Result<Vec<Complex<f64>>> {
    if curve.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: curve.ambient_dim(),
        });
    }
    let m = curve.len();
    let pts = curve.points();
    let verts: Vec<usize> = if curve.is_closed() {
        (0..m).collect()
    } else {
        (1..m - 1).collect()
    };
    let mut k = Vec::with_capacity(verts.len());
    let mut b = Vec::with_capacity(verts.len());
    for &i in &verts {
        let kn = curve_curvature_vector(curve, i)?;
        let ki = kn.norm();
        if ki < 1e-8 {
            return Err(Error::TorsionUndefined(i));
        }
        let (p, n) = curve.neighbors(i).expect("interior vertex");
        let e0 = linalg::sub(pts[i].as_slice(), pts[p].as_slice());
        let e1 = linalg::sub(pts[n].as_slice(), pts[i].as_slice());
        let bi = linalg::cross3(e0.as_slice(), e1.as_slice());
        k.push(ki);
        b.push(bi.normalize());
    }
    let r = verts.len();
    // Turning angle and arclength between consecutive reported vertices.
    let links = if curve.is_closed() { r } else { r - 1 };
    let mut theta = Vec::with_capacity(links);
    let mut len = Vec::with_capacity(links);
    for a in 0..links {
        let c = (a + 1) % r;
        let (i, j) = (verts[a], verts[c]);
        let edge = linalg::sub(pts[j].as_slice(), pts[i].as_slice());
        let cr = linalg::cross3(b[a].as_slice(), b[c].as_slice());
        theta.push(cr.dot(&edge.normalize()).atan2(b[a].dot(&b[c])));
        len.push(edge.norm());
    }
    // Vertex torsion averages the two adjacent links.
    let tau: Vec<f64> = (0..r)
        .map(|a| {
            let mut num = 0.0;
            let mut den = 0.0;
            let prev = if curve.is_closed() { Some((a + r - 1) % r) } else { a.checked_sub(1) };
            if let Some(p) = prev {
                num += theta[p];
                den += len[p];
            }
            if a < links {
                num += theta[a];
                den += len[a];
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect();
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(r);
    for a in 0..r {
        if a > 0 {
            phase += 0.5 * (tau[a - 1] + tau[a]) * len[a - 1];
        }
        out.push(Complex::from_polar(k[a], phase));
    }
    Ok(out)
}
