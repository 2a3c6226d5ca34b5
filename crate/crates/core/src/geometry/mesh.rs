use std::collections::HashMap;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::frame::NormalFrame;
use crate::error::{Error, Result};
use crate::linalg;
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
struct Topology {
    vertex_tris: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    edges: Vec<(usize, usize)>,
    closed: bool,
    connected: bool,
}

impl Topology {
    fn build(nv: usize, triangles: &[[usize; 3]]) -> Result<Self> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
        let mut vertex_tris = vec![Vec::new(); nv];
        for (ti, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if directed.insert((a, b), ti).is_some() {
                    return Err(Error::invalid(format!(
                        "edge {a}->{b} used twice with the same orientation (triangle {ti})"
                    )));
                }
                vertex_tris[t[k]].push(ti);
            }
        }
        let mut boundary = vec![false; nv];
        let mut closed = true;
        let mut edges = Vec::with_capacity(directed.len() / 2 + 1);
        let mut keys: Vec<(usize, usize)> = directed.keys().copied().collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let twin = directed.contains_key(&(b, a));
            if !twin {
                closed = false;
                boundary[a] = true;
                boundary[b] = true;
            }
            if a < b || !twin {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();

        // Connectivity over vertices that belong to some triangle.
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let used: Vec<usize> = (0..nv).filter(|&v| !vertex_tris[v].is_empty()).collect();
        let connected = match used.first() {
            Some(&v0) => {
                let r0 = find(&mut parent, v0);
                used.iter().all(|&v| find(&mut parent, v) == r0)
            }
            None => false,
        };
        Ok(Topology {
            vertex_tris,
            boundary,
            edges,
            closed,
            connected,
        })
    }
}

/// Oriented triangle mesh embedded in Rⁿ. Orientation comes from the vertex
/// order of each triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vector>,
    triangles: Vec<[usize; 3]>,
    topo: Arc<Topology>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vector>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::invalid("mesh needs vertices and triangles"));
        }
        let dim = vertices[0].len();
        if dim < 2 {
            return Err(Error::invalid("mesh ambient dimension must be at least 2"));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("non-finite vertex coordinate"));
            }
        }
        for (ti, t) in triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::invalid(format!("triangle {ti} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::invalid(format!("triangle {ti} repeats a vertex")));
            }
        }
        let topo = Topology::build(vertices.len(), &triangles)?;
        Ok(TriMesh {
            vertices,
            triangles,
            topo: Arc::new(topo),
        })
    }

    /// Same connectivity with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::LengthMismatch {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        let dim = self.ambient_dim();
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        Ok(TriMesh {
            vertices,
            triangles: self.triangles.clone(),
            topo: Arc::clone(&self.topo),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vector {
        &self.vertices[i]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Unique undirected edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.topo.edges
    }

    /// Triangles incident to vertex `v`.
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.topo.vertex_tris[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.topo.boundary[v]
    }

    /// Every edge shared by exactly two triangles with opposite orientations.
    pub fn is_closed(&self) -> bool {
        self.topo.closed
    }

    pub fn is_connected(&self) -> bool {
        self.topo.connected
    }

    pub fn require_closed(&self) -> Result<()> {
        if !self.is_closed() {
            return Err(Error::invalid("mesh is not closed"));
        }
        if !self.is_connected() {
            return Err(Error::invalid("mesh is not connected"));
        }
        Ok(())
    }

    /// Triangle `t` rotated so that `v` comes first, preserving orientation.
    pub(crate) fn rotated(&self, t: usize, v: usize) -> [usize; 3] {
        let [a, b, c] = self.triangles[t];
        if a == v {
            [a, b, c]
        } else if b == v {
            [b, c, a]
        } else {
            [c, a, b]
        }
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let x0 = self.vertices[a].as_slice();
        let u = linalg::sub(self.vertices[b].as_slice(), x0);
        let w = linalg::sub(self.vertices[c].as_slice(), x0);
        0.5 * linalg::parallelogram_area(u.as_slice(), w.as_slice())
    }

    pub fn triangle_centroid(&self, t: usize) -> Vector {
        let [a, b, c] = self.triangles[t];
        (&self.vertices[a] + &self.vertices[b] + &self.vertices[c]) / 3.0
    }

    /// Longest edge squared over twice the area, normalized so that an
    /// equilateral triangle scores 1.
    pub fn aspect_ratio(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let v = &self.vertices;
        let lmax2 = linalg::dist2(v[a].as_slice(), v[b].as_slice())
            .max(linalg::dist2(v[b].as_slice(), v[c].as_slice()))
            .max(linalg::dist2(v[c].as_slice(), v[a].as_slice()));
        let area = self.triangle_area(t);
        if area <= 0.0 {
            f64::INFINITY
        } else {
            lmax2 * 3f64.sqrt() / (4.0 * area)
        }
    }

    pub fn mean_edge_length(&self) -> f64 {
        let e = self.edges();
        e.iter()
            .map(|&(i, j)| linalg::dist(self.vertices[i].as_slice(), self.vertices[j].as_slice()))
            .sum::<f64>()
            / e.len() as f64
    }

    /// Mean length of the edges incident to `v`.
    pub fn local_spacing(&self, v: usize) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for &t in self.vertex_triangles(v) {
            let [_, a, b] = self.rotated(t, v);
            sum += linalg::dist(self.vertices[v].as_slice(), self.vertices[a].as_slice());
            sum += linalg::dist(self.vertices[v].as_slice(), self.vertices[b].as_slice());
            count += 2;
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    /// Mesh with every triangle's winding reversed.
    pub fn reversed(&self) -> Self {
        let tris = self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect();
        TriMesh::new(self.vertices.clone(), tris).expect("reversal preserves validity")
    }

    pub fn map_vertices(&self, f: impl Fn(&Vector) -> Vector) -> Result<Self> {
        self.with_vertices(self.vertices.iter().map(f).collect())
    }

    /// Oriented orthonormal tangent basis of triangle `t` from its winding.
    pub fn triangle_tangent(&self, t: usize) -> Option<[Vector; 2]> {
        let [a, b, c] = self.triangles[t];
        let x0 = self.vertices[a].as_slice();
        let u = linalg::sub(self.vertices[b].as_slice(), x0);
        let w = linalg::sub(self.vertices[c].as_slice(), x0);
        let t1 = u.normalize();
        let mut t2 = &w - &t1 * w.dot(&t1);
        let n2 = t2.norm();
        if !(n2 > 1e-14 * w.norm()) {
            return None;
        }
        t2 /= n2;
        Some([t1, t2])
    }

    /// Distance from `q` to the surface.
    pub fn distance_to(&self, q: &[f64]) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangles[t];
                point_triangle_distance(
                    q,
                    self.vertices[a].as_slice(),
                    self.vertices[b].as_slice(),
                    self.vertices[c].as_slice(),
                )
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Distance from `q` to the triangle `abc` in Rⁿ.
pub fn point_triangle_distance(q: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    use super::curve::point_segment_distance;
    let u = linalg::sub(b, a);
    let w = linalg::sub(c, a);
    let r = linalg::sub(q, a);
    let (uu, uw, ww) = (u.dot(&u), u.dot(&w), w.dot(&w));
    let (ru, rw) = (r.dot(&u), r.dot(&w));
    let det = uu * ww - uw * uw;
    if det > 1e-300 {
        let s = (ru * ww - rw * uw) / det;
        let t = (rw * uu - ru * uw) / det;
        if s >= 0.0 && t >= 0.0 && s + t <= 1.0 {
            return (r - u * s - w * t).norm();
        }
    }
    point_segment_distance(q, a, b)
        .min(point_segment_distance(q, b, c))
        .min(point_segment_distance(q, c, a))
}

/// A triangulated codimension-2 vortex membrane carrying the vorticity
/// `C·δ_P` with a single global strength `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMembrane {
    mesh: TriMesh,
    strength: f64,
}

impl DiscreteMembrane {
    pub fn new(mesh: TriMesh, strength: f64) -> Result<Self> {
        if !strength.is_finite() {
            return Err(Error::invalid("membrane strength must be finite"));
        }
        Ok(DiscreteMembrane { mesh, strength })
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        DiscreteMembrane {
            mesh: self.mesh.clone(),
            strength,
        }
    }

    pub fn with_vertices(&self, vertices: Vec<Vector>) -> Result<Self> {
        Ok(DiscreteMembrane {
            mesh: self.mesh.with_vertices(vertices)?,
            strength: self.strength,
        })
    }

    pub fn reversed(&self) -> Self {
        DiscreteMembrane {
            mesh: self.mesh.reversed(),
            strength: self.strength,
        }
    }
}

impl Deref for DiscreteMembrane {
    type Target = TriMesh;
    fn deref(&self) -> &TriMesh {
        &self.mesh
    }
}

/// Cotangent-Laplacian sum `Σ_j (cot α_ij + cot β_ij)(x_j - x_v)` and the
/// mixed Voronoi area of vertex `v`.
fn cotan_laplacian(mesh: &TriMesh, v: usize) -> Result<(Vector, f64)> {
    if mesh.is_boundary_vertex(v) || mesh.vertex_triangles(v).is_empty() {
        return Err(Error::BoundaryVertex(v));
    }
    let xs = mesh.vertices();
    let xv = xs[v].as_slice();
    let mut lap = Vector::zeros(mesh.ambient_dim());
    let mut area = 0.0;
    for &t in mesh.vertex_triangles(v) {
        let [_, a, b] = mesh.rotated(t, v);
        let (xa, xb) = (xs[a].as_slice(), xs[b].as_slice());
        let va = linalg::sub(xa, xv);
        let vb = linalg::sub(xb, xv);
        let ab = linalg::sub(xb, xa);
        // Angles at v, a and b.
        let cot_v = linalg::cot(va.as_slice(), vb.as_slice());
        let cot_a = linalg::cot((-&va).as_slice(), ab.as_slice());
        let cot_b = linalg::cot((-&vb).as_slice(), (-&ab).as_slice());
        let (Some(cot_v), Some(cot_a), Some(cot_b)) = (cot_v, cot_a, cot_b) else {
            return Err(Error::DegenerateVertexArea(v));
        };
        lap.axpy(cot_a, &vb, 1.0);
        lap.axpy(cot_b, &va, 1.0);
        let tri_area = 0.5 * linalg::parallelogram_area(va.as_slice(), vb.as_slice());
        area += if cot_v < 0.0 {
            0.5 * tri_area
        } else if cot_a < 0.0 || cot_b < 0.0 {
            0.25 * tri_area
        } else {
            0.125 * (vb.norm_squared() * cot_a + va.norm_squared() * cot_b)
        };
    }
    if !(area > 0.0) {
        return Err(Error::DegenerateVertexArea(v));
    }
    Ok((lap, area))
}

/// Mixed Voronoi area of vertex `v`.
pub fn mixed_area(mesh: &TriMesh, v: usize) -> Result<f64> {
    cotan_laplacian(mesh, v).map(|(_, a)| a)
}

/// Discrete mean-curvature vector at `v`: the cotangent Laplacian of the
/// coordinates over twice the mixed area, halved so that it is the mean
/// (not the sum) of the principal curvature vectors. A sphere of radius `R`
/// gives magnitude `1/R`, pointing inward.
pub fn membrane_mean_curvature(mesh: &TriMesh, v: usize) -> Result<Vector> {
    let (lap, area) = cotan_laplacian(mesh, v)?;
    Ok(lap / (4.0 * area))
}

/// Oriented tangent plane at `v` from the area-weighted covariance of the
/// fan edges; orientation follows the triangle winding.
pub fn vertex_tangent(mesh: &TriMesh, v: usize) -> Result<[Vector; 2]> {
    if mesh.is_boundary_vertex(v) || mesh.vertex_triangles(v).is_empty() {
        return Err(Error::BoundaryVertex(v));
    }
    let n = mesh.ambient_dim();
    let xs = mesh.vertices();
    let xv = xs[v].as_slice();
    let mut cov = DMatrix::<f64>::zeros(n, n);
    let mut fan = Vec::with_capacity(mesh.vertex_triangles(v).len());
    for &t in mesh.vertex_triangles(v) {
        let [_, a, b] = mesh.rotated(t, v);
        let u = linalg::sub(xs[a].as_slice(), xv);
        let w = linalg::sub(xs[b].as_slice(), xv);
        let area = 0.5 * linalg::parallelogram_area(u.as_slice(), w.as_slice());
        cov.ger(area, &u, &u, 1.0);
        cov.ger(area, &w, &w, 1.0);
        fan.push((u, w));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let (l1, l2) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    if !(l1 > 0.0) || l2 <= 1e-10 * l1 {
        return Err(Error::DegenerateTangent(v));
    }
    let t1: Vector = eig.eigenvectors.column(order[0]).into_owned();
    let mut t2: Vector = eig.eigenvectors.column(order[1]).into_owned();
    let winding: f64 = fan
        .iter()
        .map(|(u, w)| u.dot(&t1) * w.dot(&t2) - u.dot(&t2) * w.dot(&t1))
        .sum();
    if winding < 0.0 {
        t2 = -t2;
    }
    Ok([t1, t2])
}

/// Oriented normal frame at vertex `v` of a surface in R⁴.
pub fn membrane_normal_frame(mesh: &TriMesh, v: usize) -> Result<NormalFrame> {
    let n = mesh.ambient_dim();
    if n != 4 {
        return Err(Error::invalid(format!(
            "normal frames need codimension 2 (ambient dimension 4), got {n}"
        )));
    }
    let [t1, t2] = vertex_tangent(mesh, v)?;
    Ok(NormalFrame::from_tangent(vec![t1, t2]))
}

/// Total area of the triangles, measured in the ambient space.
pub fn membrane_volume(mesh: &TriMesh) -> f64 {
    (0..mesh.triangle_count()).map(|t| mesh.triangle_area(t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;

    #[test]
    fn icosphere_is_closed_and_connected() {
        let m = fixtures::icosphere(1.0, 2, 4);
        assert!(m.is_closed() && m.is_connected());
        assert_eq!(m.vertex_count(), 162);
    }

    #[test]
    fn flat_patch_interior_has_zero_mean_curvature() {
        let p = fixtures::flat_patch(2.0, 8, 4);
        assert!(!p.is_closed());
        let v = 4 * 9 + 4;
        assert!(!p.is_boundary_vertex(v));
        assert!(membrane_mean_curvature(&p, v).unwrap().norm() < 1e-10);
        assert!(matches!(membrane_mean_curvature(&p, 0), Err(Error::BoundaryVertex(0))));
    }

    #[test]
    fn flat_patch_frame_spans_e3_e4() {
        let p = fixtures::flat_patch(2.0, 8, 4);
        let f = membrane_normal_frame(&p, 40).unwrap();
        for e in [&f.e1, &f.e2] {
            assert!(e[0].abs() < 1e-12 && e[1].abs() < 1e-12);
        }
    }

    #[test]
    fn volume_scales_quadratically() {
        let m = fixtures::icosphere(1.0, 2, 4);
        let s = m.map_vertices(|v| v * 3.0).unwrap();
        assert!((membrane_volume(&s) / membrane_volume(&m) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn zero_area_triangle_contributes_nothing() {
        let v = |x: f64, y: f64| Vector::from_vec(vec![x, y, 0.0]);
        let m = TriMesh::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0), v(2.0, 0.0)],
            vec![[0, 1, 2], [1, 0, 3]],
        )
        .unwrap();
        assert!((membrane_volume(&m) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reject_inconsistent_orientation() {
        let v = |x: f64, y: f64| Vector::from_vec(vec![x, y]);
        let r = TriMesh::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0)],
            vec![[0, 1, 2], [0, 1, 3]],
        );
        assert!(r.is_err());
    }

    #[test]
    fn sphere_area_close_to_four_pi() {
        let m = fixtures::icosphere(1.0, 3, 4);
        let rel = (membrane_volume(&m) - 4.0 * PI).abs() / (4.0 * PI);
        assert!(rel < 0.01, "{rel}");
    }
}
