//! Velocity induced by singular vorticity: the classical filament law in
//! R³, the membrane law in Rⁿ, ε-truncation and the localized-induction
//! slope.
//!
//! For a membrane `P` of strength `C` with oriented tangent `τ` the velocity
//! is `v(q) = −C ∫_P ⋆(τ ∧ ∇_p G(q, p)) μ_P`, which in terms of the normal
//! quarter turn reads `(−1)^{l+1} C ∫_P J(Proj_N ∇_p G) μ_P` (`l = n − 2`).
//! This is normalized so that a small loop positively linking `P` (i.e.
//! `(τ, a, J a)` positive for the loop's radial direction `a` and velocity
//! `J a`) has circulation `+C`; in R³ it is exactly the classical law.

use crate::error::{Error, Result};
use crate::geometry::{
    curve_curvature_vector, distance_to_curve, membrane_mean_curvature, membrane_normal_frame,
    membrane_volume, unit_tangent, DiscreteCurve, DiscreteMembrane, NormalFrame,
};
use crate::linalg;
use crate::Vector;

/// Closest admissible approach to the carrier.
pub const CORE_RADIUS: f64 = 1e-6;

/// Smallest truncation radius in units of the local mesh spacing.
pub const MIN_EPS_OVER_H: f64 = 3.0;

/// Relative fit residual above which a slope is rejected.
pub const MAX_FIT_RESIDUAL: f64 = 0.2;

/// Refinement depth limit of the near-field membrane quadrature.
const MAX_REFINE_DEPTH: u32 = 8;

/// `G(q, p) = −|q − p|^{2−n} / ((n − 2) σ_{n−1})`, so that `Δ_p G = δ_q`.
pub fn green(n: usize, q: &[f64], p: &[f64]) -> Result<f64> {
    check_green_args(n, q, p)?;
    let r = linalg::dist(q, p);
    if r == 0.0 {
        return Err(Error::SingularEvaluation);
    }
    Ok(-r.powi(2 - n as i32) / ((n - 2) as f64 * linalg::unit_sphere_area(n)))
}

/// `∇_p G(q, p) = (p − q) / (σ_{n−1} |p − q|ⁿ)`.
pub fn green_gradient(n: usize, q: &[f64], p: &[f64]) -> Result<Vector> {
    check_green_args(n, q, p)?;
    let d = linalg::sub(p, q);
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(Error::SingularEvaluation);
    }
    let s = 1.0 / (linalg::unit_sphere_area(n) * r2.powf(n as f64 / 2.0));
    Ok(d * s)
}

fn check_green_args(n: usize, q: &[f64], p: &[f64]) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!("Green function needs n >= 3, got {n}")));
    }
    for x in [q, p] {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
    }
    Ok(())
}

/// Adds `scale · (p − q)/|p − q|ⁿ` to `acc` (the Green gradient without
/// the `1/σ` factor). Returns false at coincident points.
#[inline]
fn add_kernel(acc: &mut [f64], q: &[f64], p: &[f64], scale: f64) -> bool {
    let n = q.len();
    let mut r2 = 0.0;
    for k in 0..n {
        let d = p[k] - q[k];
        r2 += d * d;
    }
    if r2 == 0.0 {
        return false;
    }
    let f = match n {
        3 => scale / (r2 * r2.sqrt()),
        4 => scale / (r2 * r2),
        _ => scale / r2.powf(n as f64 / 2.0),
    };
    for k in 0..n {
        acc[k] += f * (p[k] - q[k]);
    }
    true
}

/// Classical filament law `v(q) = −(C/4π) ∮ (q − γ) × γ' / |q − γ|³`,
/// midpoint rule on the edges.
pub fn velocity_filament3d(curve: &DiscreteCurve, strength: f64, q: &[f64]) -> Result<Vector> {
    if curve.ambient_dim() != 3 || q.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: if q.len() != 3 { q.len() } else { curve.ambient_dim() },
        });
    }
    let d = distance_to_curve(curve, q);
    if d < CORE_RADIUS {
        return Err(Error::InsideCore(d));
    }
    Ok(filament_sum(curve, strength, q, |_| true))
}

fn filament_sum(curve: &DiscreteCurve, strength: f64, q: &[f64], keep: impl Fn(&[f64]) -> bool) -> Vector {
    let pts = curve.points();
    let mut v = [0.0; 3];
    for (i, j) in curve.edges() {
        let (a, b) = (pts[i].as_slice(), pts[j].as_slice());
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
        if !keep(&m) {
            continue;
        }
        let e = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let mut g = [0.0; 3];
        add_kernel(&mut g, q, &m, 1.0);
        // (γ − q) × γ' / |γ − q|³
        v[0] += g[1] * e[2] - g[2] * e[1];
        v[1] += g[2] * e[0] - g[0] * e[2];
        v[2] += g[0] * e[1] - g[1] * e[0];
    }
    Vector::from_column_slice(&v) * (strength / (4.0 * std::f64::consts::PI))
}

/// One flat triangle of a membrane with its `J ∘ Proj_N` matrix.
#[derive(Debug, Clone)]
struct Element {
    corners: [Vec<f64>; 3],
    area: f64,
    /// Row-major `n × n` matrix of `J ∘ Proj_N` for the triangle's plane.
    jmat: Vec<f64>,
}

/// Precomputed per-triangle data for repeated velocity evaluations.
#[derive(Debug, Clone)]
pub struct MembraneQuadrature {
    n: usize,
    /// `(−1)^{l+1} C / σ_{n−1}`.
    prefactor: f64,
    elements: Vec<Element>,
}

impl MembraneQuadrature {
    pub fn new(mem: &DiscreteMembrane) -> Result<Self> {
        let n = mem.ambient_dim();
        if n < 4 {
            return Err(Error::invalid(format!(
                "membranes need ambient dimension at least 4, got {n}"
            )));
        }
        let l = n - 2;
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        let mut elements = Vec::with_capacity(mem.triangle_count());
        for t in 0..mem.triangle_count() {
            let area = mem.triangle_area(t);
            let Some(tangent) = mem.triangle_tangent(t) else {
                // Zero-area triangles carry no vorticity.
                continue;
            };
            let frame = NormalFrame::from_tangent(tangent.to_vec());
            let jmat = j_matrix(&frame);
            let [a, b, c] = mem.triangles()[t];
            let corner = |i: usize| mem.mesh().vertex(i).as_slice().to_vec();
            elements.push(Element {
                corners: [corner(a), corner(b), corner(c)],
                area,
                jmat,
            });
        }
        Ok(MembraneQuadrature {
            n,
            prefactor: sign * mem.strength() / linalg::unit_sphere_area(n),
            elements,
        })
    }

    fn apply(&self, e: &Element, g: &[f64], out: &mut [f64], w: f64) {
        let n = self.n;
        for r in 0..n {
            let row = &e.jmat[r * n..(r + 1) * n];
            out[r] += w * linalg::dot(row, g);
        }
    }

    /// Edge-midpoint rule on one (sub)triangle, refined while `q` is close
    /// compared to its size.
    fn element_sum(&self, q: &[f64], c: [&[f64]; 3], area: f64, depth: u32, g: &mut [f64]) -> Result<()> {
        let n = self.n;
        let mid = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect() };
        let (m01, m12, m20) = (mid(c[0], c[1]), mid(c[1], c[2]), mid(c[2], c[0]));
        let diam = linalg::dist2(c[0], c[1])
            .max(linalg::dist2(c[1], c[2]))
            .max(linalg::dist2(c[2], c[0]))
            .sqrt();
        let centroid: Vec<f64> = (0..n).map(|k| (c[0][k] + c[1][k] + c[2][k]) / 3.0).collect();
        let dc = linalg::dist(q, &centroid);
        if dc < 2.0 * diam && depth < MAX_REFINE_DEPTH {
            let a4 = area / 4.0;
            self.element_sum(q, [c[0], &m01, &m20], a4, depth + 1, g)?;
            self.element_sum(q, [&m01, c[1], &m12], a4, depth + 1, g)?;
            self.element_sum(q, [&m20, &m12, c[2]], a4, depth + 1, g)?;
            self.element_sum(q, [&m01, &m12, &m20], a4, depth + 1, g)?;
            return Ok(());
        }
        for m in [&m01, &m12, &m20] {
            if !add_kernel(g, q, m, area / 3.0) {
                return Err(Error::InsideCore(0.0));
            }
        }
        Ok(())
    }

    /// Full velocity at an off-membrane point.
    pub fn velocity(&self, q: &[f64]) -> Result<Vector> {
        if q.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: q.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        let mut g = vec![0.0; self.n];
        for e in &self.elements {
            let [a, b, c] = &e.corners;
            let d = crate::geometry::point_triangle_distance(q, a, b, c);
            if d < CORE_RADIUS {
                return Err(Error::InsideCore(d));
            }
            g.iter_mut().for_each(|x| *x = 0.0);
            self.element_sum(q, [a, b, c], e.area, 0, &mut g)?;
            self.apply(e, &g, &mut out, 1.0);
        }
        Ok(Vector::from_vec(out) * self.prefactor)
    }

    /// Plain edge-midpoint rule over the triangles whose centroid lies at
    /// chordal distance at least `eps` from `q`.
    pub fn truncated(&self, q: &[f64], eps: f64) -> Vector {
        let n = self.n;
        let mut out = vec![0.0; n];
        let mut g = vec![0.0; n];
        let eps2 = eps * eps;
        for e in &self.elements {
            let [a, b, c] = &e.corners;
            let mut d2 = 0.0;
            for k in 0..n {
                let x = (a[k] + b[k] + c[k]) / 3.0 - q[k];
                d2 += x * x;
            }
            if d2 < eps2 {
                continue;
            }
            g.iter_mut().for_each(|x| *x = 0.0);
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let m: Vec<f64> = u.iter().zip(v.iter()).map(|(x, y)| 0.5 * (x + y)).collect();
                add_kernel(&mut g, q, &m, e.area / 3.0);
            }
            self.apply(e, &g, &mut out, 1.0);
        }
        Vector::from_vec(out) * self.prefactor
    }
}

fn j_matrix(frame: &NormalFrame) -> Vec<f64> {
    // J ∘ Proj_N = s (e2 e1ᵀ − e1 e2ᵀ)
    let n = frame.ambient_dim();
    let s = frame.orientation_sign;
    let (e1, e2) = (&frame.e1, &frame.e2);
    let mut m = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            m[r * n + c] = s * (e2[r] * e1[c] - e1[r] * e2[c]);
        }
    }
    m
}

/// Velocity of a membrane at an off-membrane point `q`. Triangles closer to
/// `q` than twice their size are subdivided (up to depth 8) before the
/// edge-midpoint rule is applied, so the result stays accurate down to
/// distances well below the mesh spacing.
pub fn velocity_membrane(mem: &DiscreteMembrane, q: &[f64]) -> Result<Vector> {
    MembraneQuadrature::new(mem)?.velocity(q)
}

/// Filament in R³ with its strength.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexFilament {
    pub curve: DiscreteCurve,
    pub strength: f64,
}

impl VortexFilament {
    pub fn new(curve: DiscreteCurve, strength: f64) -> Result<Self> {
        if curve.ambient_dim() != 3 || !curve.is_closed() {
            return Err(Error::invalid("a vortex filament is a closed curve in R³"));
        }
        if !strength.is_finite() {
            return Err(Error::invalid("filament strength must be finite"));
        }
        Ok(VortexFilament { curve, strength })
    }
}

/// A closed codimension-2 vortex carrier (filament in R³ or membrane in
/// Rⁿ) seen through the quantities the ε-asymptotics need.
pub trait Carrier {
    fn ambient_dim(&self) -> usize;
    fn strength(&self) -> f64;
    /// Length or area.
    fn volume(&self) -> f64;
    fn vertex_count(&self) -> usize;
    fn vertex(&self, i: usize) -> &[f64];
    /// Mean spacing of the mesh near vertex `i`.
    fn local_spacing(&self, i: usize) -> f64;
    /// Mean element size over the whole carrier.
    fn spacing(&self) -> f64;
    fn mean_curvature(&self, i: usize) -> Result<Vector>;
    fn normal_frame(&self, i: usize) -> Result<NormalFrame>;
    /// One-point quadrature nodes `(point, weight)`: edge midpoints with
    /// lengths, or triangle centroids with areas.
    fn nodes(&self) -> Vec<(Vector, f64)>;
    /// Truncated velocity at vertex `i`, no resolution check.
    fn truncated_unchecked(&self, i: usize, eps: f64) -> Result<Vector>;
}

impl Carrier for VortexFilament {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn strength(&self) -> f64 {
        self.strength
    }
    fn volume(&self) -> f64 {
        crate::geometry::curve_length(&self.curve)
    }
    fn vertex_count(&self) -> usize {
        self.curve.len()
    }
    fn vertex(&self, i: usize) -> &[f64] {
        self.curve.point(i).as_slice()
    }
    fn local_spacing(&self, i: usize) -> f64 {
        let (p, n) = self.curve.neighbors(i).expect("closed curve");
        let x = self.vertex(i);
        0.5 * (linalg::dist(x, self.vertex(p)) + linalg::dist(x, self.vertex(n)))
    }
    fn spacing(&self) -> f64 {
        self.curve.mean_edge_length()
    }
    fn mean_curvature(&self, i: usize) -> Result<Vector> {
        curve_curvature_vector(&self.curve, i)
    }
    fn normal_frame(&self, i: usize) -> Result<NormalFrame> {
        Ok(NormalFrame::from_tangent(vec![unit_tangent(&self.curve, i)?]))
    }
    fn nodes(&self) -> Vec<(Vector, f64)> {
        let pts = self.curve.points();
        self.curve
            .edges()
            .map(|(i, j)| {
                (
                    linalg::midpoint(pts[i].as_slice(), pts[j].as_slice()),
                    linalg::dist(pts[i].as_slice(), pts[j].as_slice()),
                )
            })
            .collect()
    }
    fn truncated_unchecked(&self, i: usize, eps: f64) -> Result<Vector> {
        let q = self.vertex(i);
        let eps2 = eps * eps;
        Ok(filament_sum(&self.curve, self.strength, q, |m| linalg::dist2(m, q) >= eps2))
    }
}

impl Carrier for DiscreteMembrane {
    fn ambient_dim(&self) -> usize {
        self.mesh().ambient_dim()
    }
    fn strength(&self) -> f64 {
        DiscreteMembrane::strength(self)
    }
    fn volume(&self) -> f64 {
        membrane_volume(self.mesh())
    }
    fn vertex_count(&self) -> usize {
        self.mesh().vertex_count()
    }
    fn vertex(&self, i: usize) -> &[f64] {
        self.mesh().vertex(i).as_slice()
    }
    fn local_spacing(&self, i: usize) -> f64 {
        self.mesh().local_spacing(i)
    }
    fn spacing(&self) -> f64 {
        self.mesh().mean_edge_length()
    }
    fn mean_curvature(&self, i: usize) -> Result<Vector> {
        membrane_mean_curvature(self.mesh(), i)
    }
    fn normal_frame(&self, i: usize) -> Result<NormalFrame> {
        membrane_normal_frame(self.mesh(), i)
    }
    fn nodes(&self) -> Vec<(Vector, f64)> {
        (0..self.triangle_count())
            .map(|t| (self.triangle_centroid(t), self.triangle_area(t)))
            .collect()
    }
    fn truncated_unchecked(&self, i: usize, eps: f64) -> Result<Vector> {
        Ok(MembraneQuadrature::new(self)?.truncated(self.vertex(i), eps))
    }
}

fn check_eps(c: &impl Carrier, i: usize, eps: f64) -> Result<()> {
    let min = MIN_EPS_OVER_H * c.local_spacing(i);
    if !(eps >= min) {
        return Err(Error::TruncationBelowResolution { eps, min });
    }
    Ok(())
}

/// Biot–Savart velocity at vertex `i` of a membrane with every triangle
/// whose centroid lies within chordal distance `eps` of the vertex removed.
/// Requires `eps ≥ 3h` with `h` the mean length of the edges at `i`.
pub fn velocity_truncated(mem: &DiscreteMembrane, i: usize, eps: f64) -> Result<Vector> {
    check_eps(mem, i, eps)?;
    mem.truncated_unchecked(i, eps)
}

/// Filament counterpart of [`velocity_truncated`] (edge midpoints).
pub fn velocity_truncated_filament(fil: &VortexFilament, i: usize, eps: f64) -> Result<Vector> {
    check_eps(fil, i, eps)?;
    fil.truncated_unchecked(i, eps)
}

/// Result of a localized-induction slope fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LiaSlope {
    /// `d v_ε / d ln(1/ε)`.
    pub slope: Vector,
    pub intercept: Vector,
    /// Angle between the slope and the predicted direction
    /// `sign(C) (−1)^l J(MC)`; `None` where the mean curvature vanishes.
    pub direction_error_deg: Option<f64>,
    /// `|slope| / |MC|`, the empirical dimensional constant; `None` where
    /// the mean curvature vanishes.
    pub c_n_estimate: Option<f64>,
    pub fit_residual: f64,
    pub mean_curvature: Vector,
}

/// Mean curvature below which the direction is reported as not applicable.
const FLAT_CURVATURE: f64 = 1e-8;

/// Regresses `v_ε(q)` on `ln(1/ε)` componentwise. Needs at least five
/// radii spanning a decade, all at least `3h`; the order of `eps` is
/// irrelevant.
pub fn lia_slope(c: &impl Carrier, i: usize, eps: &[f64]) -> Result<LiaSlope> {
    check_eps_list(eps)?;
    for &e in eps {
        check_eps(c, i, e)?;
    }
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let vs = eps
        .iter()
        .map(|&e| c.truncated_unchecked(i, e))
        .collect::<Result<Vec<_>>>()?;
    let (intercept, slope) = linalg::linear_fit(&xs, &vs);
    let fit_residual = linalg::fit_residual(&xs, &vs, &intercept, &slope);
    if !(fit_residual <= MAX_FIT_RESIDUAL) {
        return Err(Error::AsymptoticRegimeNotReached(fit_residual));
    }
    let mc = c.mean_curvature(i)?;
    let (direction_error_deg, c_n_estimate) = if mc.norm() > FLAT_CURVATURE {
        let frame = c.normal_frame(i)?;
        let l = c.ambient_dim() - 2;
        let sign = c.strength().signum() * if l % 2 == 0 { 1.0 } else { -1.0 };
        let predicted = frame.rotate_projected(mc.as_slice()) * sign;
        let cosang = slope.dot(&predicted) / (slope.norm() * predicted.norm());
        let angle = cosang.clamp(-1.0, 1.0).acos().to_degrees();
        (Some(angle), Some(slope.norm() / mc.norm()))
    } else {
        (None, None)
    };
    Ok(LiaSlope {
        slope,
        intercept,
        direction_error_deg,
        c_n_estimate,
        fit_residual,
        mean_curvature: mc,
    })
}

pub(crate) fn check_eps_list(eps: &[f64]) -> Result<()> {
    if eps.len() < 5 {
        return Err(Error::invalid(format!("need at least 5 truncation radii, got {}", eps.len())));
    }
    if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::invalid("truncation radii must be positive"));
    }
    let max = eps.iter().cloned().fold(f64::MIN, f64::max);
    let min = eps.iter().cloned().fold(f64::MAX, f64::min);
    if max / min < 10.0 * (1.0 - 1e-12) {
        return Err(Error::invalid(format!(
            "truncation radii must span a decade, got {min:.3e}..{max:.3e}"
        )));
    }
    Ok(())
}

/// `count` radii log-spaced from `3h·10^decades` down to `3h`.
pub fn eps_ladder(h: f64, decades: f64, count: usize) -> Vec<f64> {
    let lo = MIN_EPS_OVER_H * h;
    (0..count)
        .map(|k| lo * 10f64.powf(decades * (count - 1 - k) as f64 / (count - 1) as f64))
        .collect()
}
