//! Skew-mean-curvature flow `∂ₜP = −J(MC)` of codimension-2 membranes.

use crate::error::{Error, Result};
use crate::geometry::{
    curve_curvature_vector, membrane_mean_curvature, membrane_normal_frame, membrane_volume,
    unit_tangent, DiscreteCurve, DiscreteMembrane, NormalFrame, TriMesh,
};
use crate::Vector;

/// Largest triangle aspect ratio tolerated during evolution.
pub const MAX_ASPECT_RATIO: f64 = 100.0;

/// Tangential part of the mean-curvature estimate above which a debug
/// message is emitted (relative to its magnitude).
const PROJECTION_LOG_THRESHOLD: f64 = 1e-3;

/// `−J(Proj_N MC)` at vertex `v`. Works on any vertex with a full fan,
/// including interior vertices of open patches.
pub fn skew_mc_vertex_velocity(mesh: &TriMesh, v: usize) -> Result<Vector> {
    let mc = membrane_mean_curvature(mesh, v)?;
    let frame = membrane_normal_frame(mesh, v)?;
    let residual = frame.normal_residual(mc.as_slice());
    if residual > PROJECTION_LOG_THRESHOLD * mc.norm() {
        log::debug!(
            "membrane_flow::skew_mc_velocity: vertex {v} tangential MC residual {residual:.3e} of {:.3e}",
            mc.norm()
        );
    }
    Ok(-frame.rotate_projected(mc.as_slice()))
}

/// Per-vertex skew-mean-curvature velocity of a closed membrane.
pub fn skew_mc_velocity(mem: &DiscreteMembrane) -> Result<Vec<Vector>> {
    skew_mc_velocity_mesh(mem.mesh())
}

fn skew_mc_velocity_mesh(mesh: &TriMesh) -> Result<Vec<Vector>> {
    if mesh.ambient_dim() < 4 {
        return Err(Error::invalid(format!(
            "membranes need ambient dimension at least 4, got {} (use the curve path in R³)",
            mesh.ambient_dim()
        )));
    }
    mesh.require_closed()?;
    (0..mesh.vertex_count())
        .map(|v| skew_mc_vertex_velocity(mesh, v))
        .collect()
}

/// The same flow for a closed curve in R³, the codimension-2 object of
/// that dimension: mean curvature is `k n`, the normal plane is `t^⊥`.
pub fn skew_mc_velocity_curve(curve: &DiscreteCurve) -> Result<Vec<Vector>> {
    if curve.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: curve.ambient_dim(),
        });
    }
    if !curve.is_closed() {
        return Err(Error::invalid("the flow needs a closed curve"));
    }
    (0..curve.len())
        .map(|i| {
            let mc = curve_curvature_vector(curve, i)?;
            let frame = NormalFrame::from_tangent(vec![unit_tangent(curve, i)?]);
            Ok(-frame.rotate_projected(mc.as_slice()))
        })
        .collect()
}

fn rk4_step(mesh: &TriMesh, dt: f64) -> Result<TriMesh> {
    let x0 = mesh.vertices();
    let shifted = |k: &[Vector], a: f64| mesh.with_vertices(x0.iter().zip(k).map(|(x, v)| x + v * a).collect());
    let k1 = skew_mc_velocity_mesh(mesh)?;
    let k2 = skew_mc_velocity_mesh(&shifted(&k1, dt / 2.0)?)?;
    let k3 = skew_mc_velocity_mesh(&shifted(&k2, dt / 2.0)?)?;
    let k4 = skew_mc_velocity_mesh(&shifted(&k3, dt)?)?;
    mesh.with_vertices(
        (0..x0.len())
            .map(|i| &x0[i] + (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (dt / 6.0))
            .collect(),
    )
}

/// Vertex average.
pub fn centroid(mesh: &TriMesh) -> Vector {
    let mut c = Vector::zeros(mesh.ambient_dim());
    for v in mesh.vertices() {
        c += v;
    }
    c / mesh.vertex_count() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembraneRecord {
    pub step: usize,
    pub t: f64,
    pub volume: f64,
    pub centroid: Vector,
}

fn record(mesh: &TriMesh, step: usize, t: f64) -> MembraneRecord {
    MembraneRecord {
        step,
        t,
        volume: membrane_volume(mesh),
        centroid: centroid(mesh),
    }
}

/// RK4 evolution; returns the final membrane and one record per step
/// (index 0 is the initial state).
pub fn evolve_membrane(
    mem: &DiscreteMembrane,
    dt: f64,
    steps: usize,
) -> Result<(DiscreteMembrane, Vec<MembraneRecord>)> {
    evolve_membrane_with(mem, dt, steps, |_, _, _| {})
}

/// [`evolve_membrane`] with an observer called as
/// `observer(step, t, membrane)` after every step, e.g. for mesh dumps.
pub fn evolve_membrane_with(
    mem: &DiscreteMembrane,
    dt: f64,
    steps: usize,
    mut observer: impl FnMut(usize, f64, &DiscreteMembrane),
) -> Result<(DiscreteMembrane, Vec<MembraneRecord>)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let mut mesh = mem.mesh().clone();
    let mut records = Vec::with_capacity(steps + 1);
    records.push(record(&mesh, 0, 0.0));
    for s in 1..=steps {
        mesh = rk4_step(&mesh, dt)?;
        for t in 0..mesh.triangle_count() {
            let q = mesh.aspect_ratio(t);
            if !(q <= MAX_ASPECT_RATIO) {
                return Err(Error::MeshDegeneration(t, q));
            }
        }
        let t = s as f64 * dt;
        records.push(record(&mesh, s, t));
        let cur = DiscreteMembrane::new(mesh.clone(), mem.strength())?;
        observer(s, t, &cur);
    }
    Ok((DiscreteMembrane::new(mesh, mem.strength())?, records))
}
