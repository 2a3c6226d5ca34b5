use crate::error::{Error, Result};
use crate::linalg;
use crate::Vector;

/// Relative tolerance below which three points are treated as collinear.
const COLLINEAR_TOLERANCE: f64 = 1e-12;

/// Oriented polyline in Rⁿ, closed for every flow in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    points: Vec<Vector>,
    closed: bool,
}

impl DiscreteCurve {
    pub fn new(points: Vec<Vector>, closed: bool) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::invalid(format!(
                "a curve needs at least 4 vertices, got {}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim < 2 {
            return Err(Error::invalid("curve ambient dimension must be at least 2"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("non-finite curve coordinate"));
            }
        }
        let curve = DiscreteCurve { points, closed };
        for (i, j) in curve.edges() {
            if linalg::dist2(curve.points[i].as_slice(), curve.points[j].as_slice()) == 0.0 {
                return Err(Error::DegenerateEdge(i));
            }
        }
        Ok(curve)
    }

    pub fn closed(points: Vec<Vector>) -> Result<Self> {
        Self::new(points, true)
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Vector {
        &self.points[i]
    }

    pub fn into_points(self) -> Vec<Vector> {
        self.points
    }

    /// Same connectivity, new vertex positions.
    pub fn with_points(&self, points: Vec<Vector>) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                got: points.len(),
            });
        }
        Self::new(points, self.closed)
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    /// Oriented edges `(i, i + 1)`, wrapping around for closed curves.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.points.len();
        (0..self.edge_count()).map(move |i| (i, (i + 1) % m))
    }

    /// Previous and next vertex of `i`, if both exist.
    pub fn neighbors(&self, i: usize) -> Option<(usize, usize)> {
        let m = self.points.len();
        if self.closed {
            Some(((i + m - 1) % m, (i + 1) % m))
        } else if i == 0 || i + 1 >= m {
            None
        } else {
            Some((i - 1, i + 1))
        }
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.edges()
            .map(|(i, j)| linalg::dist(self.points[i].as_slice(), self.points[j].as_slice()))
            .sum::<f64>()
            / self.edge_count() as f64
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        DiscreteCurve {
            points,
            closed: self.closed,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        DiscreteCurve {
            points: self.points.iter().map(|p| p * lambda).collect(),
            closed: self.closed,
        }
    }

    pub fn translated(&self, shift: &Vector) -> Self {
        DiscreteCurve {
            points: self.points.iter().map(|p| p + shift).collect(),
            closed: self.closed,
        }
    }
}

/// Curvature vector `k·n` at `at` from the circle through `prev`, `at` and
/// `next`: magnitude `1/R_circ`, pointing from `at` to the circumcenter.
/// Returns the zero vector for collinear points.
pub fn circumcircle_curvature(prev: &[f64], at: &[f64], next: &[f64]) -> Result<Vector> {
    let u = linalg::sub(prev, at);
    let w = linalg::sub(next, at);
    let uu = u.norm_squared();
    let ww = w.norm_squared();
    if uu == 0.0 || ww == 0.0 {
        return Err(Error::DegenerateEdge(0));
    }
    let uw = u.dot(&w);
    let gram = uu * ww - uw * uw;
    if gram <= COLLINEAR_TOLERANCE * uu * ww {
        return Ok(Vector::zeros(u.len()));
    }
    // Circumcenter offset x = a u + b w with x·u = |u|²/2 and x·w = |w|²/2.
    let a = 0.5 * ww * (uu - uw) / gram;
    let b = 0.5 * uu * (ww - uw) / gram;
    let x = &u * a + &w * b;
    let r2 = x.norm_squared();
    Ok(x / r2)
}

/// Discrete curvature vector at vertex `i` of a curve.
pub fn curve_curvature_vector(curve: &DiscreteCurve, i: usize) -> Result<Vector> {
    let (p, n) = curve.neighbors(i).ok_or(Error::Endpoint(i))?;
    let pts = curve.points();
    circumcircle_curvature(pts[p].as_slice(), pts[i].as_slice(), pts[n].as_slice())
        .map_err(|_| Error::DegenerateEdge(i))
}

/// Sum of edge lengths.
pub fn curve_length(curve: &DiscreteCurve) -> f64 {
    let pts = curve.points();
    curve
        .edges()
        .map(|(i, j)| linalg::dist(pts[i].as_slice(), pts[j].as_slice()))
        .sum()
}

/// Normalized central difference at vertex `i`.
pub fn unit_tangent(curve: &DiscreteCurve, i: usize) -> Result<Vector> {
    let (p, n) = curve.neighbors(i).ok_or(Error::Endpoint(i))?;
    let d = linalg::sub(curve.point(n).as_slice(), curve.point(p).as_slice());
    let len = d.norm();
    if len == 0.0 {
        return Err(Error::DegenerateEdge(i));
    }
    Ok(d / len)
}

/// Distance from `q` to the segment `[a, b]`.
pub fn point_segment_distance(q: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = linalg::sub(b, a);
    let aq = linalg::sub(q, a);
    let l2 = ab.norm_squared();
    let t = if l2 == 0.0 {
        0.0
    } else {
        (aq.dot(&ab) / l2).clamp(0.0, 1.0)
    };
    (aq - ab * t).norm()
}

/// Distance from `q` to the polyline.
pub fn distance_to_curve(curve: &DiscreteCurve, q: &[f64]) -> f64 {
    let pts = curve.points();
    curve
        .edges()
        .map(|(i, j)| point_segment_distance(q, pts[i].as_slice(), pts[j].as_slice()))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two polylines, measured from the
/// vertices of each to the segments of the other.
pub fn hausdorff_distance(a: &DiscreteCurve, b: &DiscreteCurve) -> f64 {
    let one_way = |x: &DiscreteCurve, y: &DiscreteCurve| {
        x.points()
            .iter()
            .map(|p| distance_to_curve(y, p.as_slice()))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn polygon(m: usize, r: f64) -> DiscreteCurve {
        let pts = (0..m)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / m as f64;
                Vector::from_vec(vec![r * th.cos(), r * th.sin(), 0.0])
            })
            .collect();
        DiscreteCurve::closed(pts).unwrap()
    }

    #[test]
    fn polygon_curvature_points_to_center() {
        let c = polygon(256, 1.0);
        for i in [0, 17, 255] {
            let k = curve_curvature_vector(&c, i).unwrap();
            assert!((k.norm() - 1.0).abs() < 1e-3);
            let to_center = -c.point(i) / c.point(i).norm();
            assert!((k.normalize() - to_center).norm() < 1e-9);
        }
    }

    #[test]
    fn radius_two_gives_half() {
        let c = polygon(256, 2.0);
        assert!((curve_curvature_vector(&c, 3).unwrap().norm() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn collinear_points_have_zero_curvature() {
        let k = circumcircle_curvature(&[0.0, 0.0], &[1.0, 0.0], &[2.5, 0.0]).unwrap();
        assert_eq!(k.norm(), 0.0);
    }

    #[test]
    fn repeated_neighbor_is_degenerate() {
        let r = circumcircle_curvature(&[1.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]);
        assert!(matches!(r, Err(Error::DegenerateEdge(_))));
    }

    #[test]
    fn lengths() {
        let c = polygon(1024, 1.0);
        let exact = 2.0 * 1024.0 * (PI / 1024.0).sin();
        assert!((curve_length(&c) - exact).abs() < 1e-12);
        assert!((curve_length(&c) - 2.0 * PI).abs() < 1e-4);
        let square = DiscreteCurve::closed(vec![
            Vector::from_vec(vec![0.0, 0.0]),
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![1.0, 1.0]),
            Vector::from_vec(vec![0.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(curve_length(&square), 4.0);
        assert!((curve_length(&square.scaled(2.5)) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn open_curve_endpoints_have_no_curvature() {
        let pts = (0..5)
            .map(|i| Vector::from_vec(vec![i as f64, (i * i) as f64]))
            .collect();
        let c = DiscreteCurve::new(pts, false).unwrap();
        assert!(matches!(curve_curvature_vector(&c, 0), Err(Error::Endpoint(0))));
        assert!(curve_curvature_vector(&c, 2).is_ok());
    }

    #[test]
    fn rejects_repeated_vertices() {
        let p = Vector::from_vec(vec![0.0, 0.0]);
        let pts = vec![
            p.clone(),
            p,
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![0.0, 1.0]),
        ];
        assert!(matches!(DiscreteCurve::closed(pts), Err(Error::DegenerateEdge(0))));
    }

    /// Curvature of an ellipse sampled at uniform parameter steps converges at
    /// second order in the spacing (circles are reproduced exactly, so they
    /// cannot exhibit a rate).
    #[test]
    fn ellipse_curvature_converges_second_order() {
        let (a, b) = (1.5, 0.8);
        let exact = |t: f64| a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5);
        let mut logs = Vec::new();
        for m in [64usize, 128, 256, 512, 1024] {
            let pts: Vec<Vector> = (0..m)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / m as f64;
                    Vector::from_vec(vec![a * t.cos(), b * t.sin()])
                })
                .collect();
            let c = DiscreteCurve::closed(pts).unwrap();
            let i = m / 8 + m / 32; // a generic, non-symmetric point
            let t = 2.0 * PI * i as f64 / m as f64;
            let err = (curve_curvature_vector(&c, i).unwrap().norm() - exact(t)).abs();
            logs.push(((2.0 * PI / m as f64).ln(), err.ln()));
        }
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(slope >= 1.9, "convergence slope {slope}");
    }
}
