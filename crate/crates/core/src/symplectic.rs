//! Symplectic forms of singular vorticities: Kirillov–Kostant on point
//! vortices, Marsden–Weinstein on curves and membranes, and the vortex-sheet
//! form and pairing; plus the family-of-binormal-flows sheet evolution.

use crate::error::{Error, Result};
use crate::filament3d;
use crate::geometry::{curve_length, membrane_normal_frame, DiscreteCurve, DiscreteMembrane, TriMesh};
use crate::linalg;
use crate::pointvortex2d::VortexConfig2D;
use crate::Vector;

/// Closedness tolerance for edge cochains, relative to their largest value.
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-12;

fn check_len<T>(expected: usize, xs: &[T]) -> Result<()> {
    if xs.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: xs.len(),
        });
    }
    Ok(())
}

fn check_dims(dim: usize, xs: &[Vector]) -> Result<()> {
    match xs.iter().find(|x| x.len() != dim) {
        Some(x) => Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        }),
        None => Ok(()),
    }
}

/// `Σ_j κ_j det(V_j, W_j)`.
pub fn kk_form_points(cfg: &VortexConfig2D, v: &[[f64; 2]], w: &[[f64; 2]]) -> Result<f64> {
    check_len(cfg.len(), v)?;
    check_len(cfg.len(), w)?;
    Ok(cfg
        .strengths()
        .iter()
        .zip(v.iter().zip(w))
        .map(|(k, (a, b))| k * (a[0] * b[1] - a[1] * b[0]))
        .sum())
}

/// `∮ det[V, W, γ'] dθ` with the fields averaged onto edge midpoints.
pub fn mw_form_curve(curve: &DiscreteCurve, v: &[Vector], w: &[Vector]) -> Result<f64> {
    if curve.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: curve.ambient_dim(),
        });
    }
    check_len(curve.len(), v)?;
    check_len(curve.len(), w)?;
    check_dims(3, v)?;
    check_dims(3, w)?;
    let pts = curve.points();
    Ok(curve
        .edges()
        .map(|(i, j)| {
            let vm = linalg::midpoint(v[i].as_slice(), v[j].as_slice());
            let wm = linalg::midpoint(w[i].as_slice(), w[j].as_slice());
            let e = linalg::sub(pts[j].as_slice(), pts[i].as_slice());
            linalg::det(&[vm.as_slice(), wm.as_slice(), e.as_slice()])
        })
        .sum())
}

/// `∫_P i_V i_W μ` for a closed membrane in R⁴. The fields are projected to
/// the vertex normal planes first; each triangle contributes the vertex
/// average of `det[V, W, e₁, e₂] / 2` over its oriented edge pair.
pub fn mw_form_membrane(mem: &DiscreteMembrane, v: &[Vector], w: &[Vector]) -> Result<f64> {
    mem.require_closed()?;
    let n = mem.ambient_dim();
    check_len(mem.vertex_count(), v)?;
    check_len(mem.vertex_count(), w)?;
    check_dims(n, v)?;
    check_dims(n, w)?;
    let mut pv = Vec::with_capacity(v.len());
    let mut pw = Vec::with_capacity(w.len());
    let mut worst = 0.0f64;
    for i in 0..mem.vertex_count() {
        let f = membrane_normal_frame(mem, i)?;
        worst = worst
            .max(f.normal_residual(v[i].as_slice()))
            .max(f.normal_residual(w[i].as_slice()));
        pv.push(f.project(v[i].as_slice()));
        pw.push(f.project(w[i].as_slice()));
    }
    if worst > 1e-8 {
        log::debug!("symplectic::mw_form_membrane: largest tangential field residual {worst:.3e}");
    }
    Ok(tri_sum(mem.mesh(), |[a, b, c], e1, e2| {
        [a, b, c]
            .iter()
            .map(|&k| linalg::det(&[pv[k].as_slice(), pw[k].as_slice(), e1, e2]))
            .sum::<f64>()
            / 6.0
    }))
}

fn tri_sum(mesh: &TriMesh, mut f: impl FnMut([usize; 3], &[f64], &[f64]) -> f64) -> f64 {
    let xs = mesh.vertices();
    mesh.triangles()
        .iter()
        .map(|&[a, b, c]| {
            let e1 = linalg::sub(xs[b].as_slice(), xs[a].as_slice());
            let e2 = linalg::sub(xs[c].as_slice(), xs[a].as_slice());
            f([a, b, c], e1.as_slice(), e2.as_slice())
        })
        .sum()
}

/// Closed surface in R³ carrying a closed discrete 1-form `α`, stored as an
/// edge cochain aligned with [`TriMesh::edges`] (value on `i → j`, `i < j`).
#[derive(Debug, Clone, PartialEq)]
pub struct VortexSheet {
    mesh: TriMesh,
    alpha: Vec<f64>,
    potential: Option<Vec<f64>>,
}

fn require_sheet_mesh(mesh: &TriMesh) -> Result<()> {
    if mesh.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: mesh.ambient_dim(),
        });
    }
    mesh.require_closed()
}

impl VortexSheet {
    /// Exact sheet `α = df` from vertex values.
    pub fn exact(mesh: TriMesh, f: Vec<f64>) -> Result<Self> {
        require_sheet_mesh(&mesh)?;
        check_len(mesh.vertex_count(), &f)?;
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite potential value"));
        }
        let alpha = mesh.edges().iter().map(|&(i, j)| f[j] - f[i]).collect();
        Ok(VortexSheet {
            mesh,
            alpha,
            potential: Some(f),
        })
    }

    /// Sheet from values on oriented edges `(i, j, α(i → j))`. Every edge must
    /// be given exactly once (in either orientation) and `α` must be closed.
    pub fn from_edge_values(mesh: TriMesh, values: &[(usize, usize, f64)]) -> Result<Self> {
        require_sheet_mesh(&mesh)?;
        let edges = mesh.edges();
        let mut alpha = vec![f64::NAN; edges.len()];
        for &(i, j, a) in values {
            let key = (i.min(j), i.max(j));
            let idx = edges
                .binary_search(&key)
                .map_err(|_| Error::invalid(format!("({i}, {j}) is not an edge of the mesh")))?;
            if !alpha[idx].is_nan() {
                return Err(Error::invalid(format!("edge ({i}, {j}) given twice")));
            }
            if !a.is_finite() {
                return Err(Error::invalid(format!("non-finite value on edge ({i}, {j})")));
            }
            alpha[idx] = if i < j { a } else { -a };
        }
        if let Some(idx) = alpha.iter().position(|a| a.is_nan()) {
            let (i, j) = edges[idx];
            return Err(Error::invalid(format!("no value for edge ({i}, {j})")));
        }
        let sheet = VortexSheet {
            mesh,
            alpha,
            potential: None,
        };
        sheet.check_closed()?;
        Ok(sheet)
    }

    fn check_closed(&self) -> Result<()> {
        let scale = self.alpha.iter().fold(1.0f64, |m, a| m.max(a.abs()));
        for (t, &[a, b, c]) in self.mesh.triangles().iter().enumerate() {
            let d = self.alpha_on(a, b) + self.alpha_on(b, c) + self.alpha_on(c, a);
            if d.abs() > CLOSEDNESS_TOLERANCE * scale {
                return Err(Error::NonClosedAlpha(t, d));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn potential(&self) -> Option<&[f64]> {
        self.potential.as_deref()
    }

    /// Edge cochain aligned with `mesh().edges()`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `α` on the oriented edge `i → j`.
    pub fn alpha_on(&self, i: usize, j: usize) -> f64 {
        let idx = self
            .mesh
            .edges()
            .binary_search(&(i.min(j), i.max(j)))
            .expect("edge of the mesh");
        if i < j {
            self.alpha[idx]
        } else {
            -self.alpha[idx]
        }
    }

    /// Same sheet with the potential shifted by a constant.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let f = self.potential.as_ref().ok_or(Error::NonExactAlpha)?;
        VortexSheet::exact(self.mesh.clone(), f.iter().map(|x| x + c).collect())
    }
}

/// Flux of `fV` through the sheet: `Σ f(centroid) (V·n̂) area`, with `V`
/// given at triangle centroids.
pub fn sheet_pairing(sheet: &VortexSheet, v: &[Vector]) -> Result<f64> {
    let f = sheet.potential.as_ref().ok_or(Error::NonExactAlpha)?;
    check_len(sheet.mesh.triangle_count(), v)?;
    check_dims(3, v)?;
    let mut t = 0;
    Ok(tri_sum(&sheet.mesh, |[a, b, c], e1, e2| {
        let area_normal = linalg::cross3(e1, e2) * 0.5;
        let fc = (f[a] + f[b] + f[c]) / 3.0;
        let r = fc * area_normal.dot(&v[t]);
        t += 1;
        r
    }))
}

/// `∫_Γ α ∧ i_V i_W μ`, with `i_V i_W μ` the 1-form `Z ↦ det[W, V, Z]`
/// averaged over the triangle's vertices.
pub fn sheet_form(sheet: &VortexSheet, v: &[Vector], w: &[Vector]) -> Result<f64> {
    let m = &sheet.mesh;
    check_len(m.vertex_count(), v)?;
    check_len(m.vertex_count(), w)?;
    check_dims(3, v)?;
    check_dims(3, w)?;
    Ok(tri_sum(m, |[a, b, c], e1, e2| {
        let beta = |z: &[f64]| {
            [a, b, c]
                .iter()
                .map(|&k| linalg::det(&[w[k].as_slice(), v[k].as_slice(), z]))
                .sum::<f64>()
                / 3.0
        };
        let (a1, a2) = (sheet.alpha_on(a, b), sheet.alpha_on(a, c));
        0.5 * (a1 * beta(e2) - a2 * beta(e1))
    }))
}

/// A sheet fibered into closed curves `Γ_f` at uniform spacing `df` of the
/// fiber parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetFibration {
    fibers: Vec<DiscreteCurve>,
    df: f64,
}

impl SheetFibration {
    pub fn new(fibers: Vec<DiscreteCurve>, df: f64) -> Result<Self> {
        if fibers.is_empty() {
            return Err(Error::invalid("a fibration needs at least one fiber"));
        }
        if !(df > 0.0) || !df.is_finite() {
            return Err(Error::invalid(format!("fiber spacing must be positive, got {df}")));
        }
        let n = fibers[0].len();
        for (k, c) in fibers.iter().enumerate() {
            if c.ambient_dim() != 3 || !c.is_closed() {
                return Err(Error::invalid(format!("fiber {k} is not a closed curve in R³")));
            }
            if c.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: c.len(),
                });
            }
        }
        Ok(SheetFibration { fibers, df })
    }

    pub fn fibers(&self) -> &[DiscreteCurve] {
        &self.fibers
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    /// `H = Σ_f length(Γ_f) df`.
    pub fn hamiltonian(&self) -> f64 {
        self.fibers.iter().map(curve_length).sum::<f64>() * self.df
    }
}

/// One RK4 binormal step applied to every fiber independently.
pub fn sheet_family_binormal_step(fib: &SheetFibration, dt: f64) -> Result<SheetFibration> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be non-negative, got {dt}")));
    }
    let fibers = fib
        .fibers
        .iter()
        .map(|c| filament3d::rk4_step(c, dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(SheetFibration { fibers, df: fib.df })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::vector;
    use std::f64::consts::PI;

    #[test]
    fn kk_single_term() {
        let cfg = VortexConfig2D::new(vec![[0.0, 0.0]], vec![3.0]).unwrap();
        assert_eq!(kk_form_points(&cfg, &[[1.0, 0.0]], &[[0.0, 1.0]]).unwrap(), 3.0);
        assert_eq!(kk_form_points(&cfg, &[[1.0, 2.0]], &[[1.0, 2.0]]).unwrap(), 0.0);
    }

    fn circle_fields(c: &DiscreteCurve) -> (Vec<Vector>, Vec<Vector>) {
        let v = vec![vector(&[0.0, 0.0, 1.0]); c.len()];
        let w = c.points().iter().map(|p| p.normalize()).collect();
        (v, w)
    }

    #[test]
    fn mw_curve_circle() {
        let c = fixtures::circle3d(1024);
        let (v, w) = circle_fields(&c);
        assert!((mw_form_curve(&c, &v, &w).unwrap() - 2.0 * PI).abs() < 1e-3);
        assert_eq!(mw_form_curve(&c, &v, &v).unwrap(), 0.0);
        let c2 = fixtures::circle3d(2048);
        let (v2, w2) = circle_fields(&c2);
        let d = mw_form_curve(&c2, &v2, &w2).unwrap() - mw_form_curve(&c, &v, &w).unwrap();
        assert!(d.abs() < 1e-3);
    }

    #[test]
    fn mw_membrane_frame_fields_give_area() {
        let m = fixtures::icosphere4d(1.0, 3);
        let frames: Vec<_> = (0..m.vertex_count())
            .map(|i| membrane_normal_frame(&m, i).unwrap())
            .collect();
        let v: Vec<Vector> = frames.iter().map(|f| f.e1.clone()).collect();
        let w: Vec<Vector> = frames.iter().map(|f| f.rotate_projected(f.e1.as_slice())).collect();
        let area = crate::geometry::membrane_volume(&m);
        let val = mw_form_membrane(&m, &v, &w).unwrap();
        assert!((val - area).abs() < 1e-2 * area, "{val} vs {area}");
    }

    #[test]
    fn sheet_pairing_sphere() {
        let mesh = fixtures::icosphere(1.0, 4, 3);
        let f = mesh.vertices().iter().map(|p| p[2]).collect();
        let sheet = VortexSheet::exact(mesh, f).unwrap();
        let v = vec![vector(&[0.0, 0.0, 1.0]); sheet.mesh().triangle_count()];
        let val = sheet_pairing(&sheet, &v).unwrap();
        assert!((val - 4.0 * PI / 3.0).abs() < 1e-2 * 4.0 * PI / 3.0, "{val}");
        // Gauge shift adds c times the (zero) total flux.
        let shifted = sheet_pairing(&sheet.shifted(2.5).unwrap(), &v).unwrap();
        assert!((shifted - val).abs() < 1e-12);
    }

    #[test]
    fn sheet_form_proportional_forms_vanish() {
        let mesh = fixtures::icosphere(1.0, 3, 3);
        let f = mesh.vertices().iter().map(|p| p[2]).collect();
        let sheet = VortexSheet::exact(mesh, f).unwrap();
        let n = sheet.mesh().vertex_count();
        let v = vec![vector(&[1.0, 0.0, 0.0]); n];
        let w = vec![vector(&[0.0, 1.0, 0.0]); n];
        assert!(sheet_form(&sheet, &v, &w).unwrap().abs() < 1e-8);
    }

    #[test]
    fn non_closed_alpha_rejected() {
        let mesh = fixtures::icosphere(1.0, 0, 3);
        let vals: Vec<(usize, usize, f64)> = mesh.edges().iter().map(|&(i, j)| (i, j, 1.0)).collect();
        assert!(matches!(
            VortexSheet::from_edge_values(mesh, &vals),
            Err(Error::NonClosedAlpha(..))
        ));
    }

    #[test]
    fn non_exact_pairing_rejected() {
        let mesh = fixtures::icosphere(1.0, 0, 3);
        let vals: Vec<(usize, usize, f64)> = mesh.edges().iter().map(|&(i, j)| (i, j, 0.0)).collect();
        let sheet = VortexSheet::from_edge_values(mesh, &vals).unwrap();
        let v = vec![vector(&[0.0, 0.0, 1.0]); sheet.mesh().triangle_count()];
        assert_eq!(sheet_pairing(&sheet, &v), Err(Error::NonExactAlpha));
    }

    #[test]
    fn fibration_translates() {
        let fib = fixtures::cylinder_fibration(4, 128, 1.0, 0.5);
        let h0 = fib.hamiltonian();
        let mut cur = fib.clone();
        for _ in 0..100 {
            cur = sheet_family_binormal_step(&cur, 1e-3).unwrap();
        }
        assert!((cur.hamiltonian() / h0 - 1.0).abs() < 1e-4);
        for (a, b) in fib.fibers().iter().zip(cur.fibers()) {
            for (p, q) in a.points().iter().zip(b.points()) {
                assert!(((q - p) - vector(&[0.0, 0.0, 0.1])).norm() < 1e-3);
            }
        }
        assert_eq!(sheet_family_binormal_step(&fib, 0.0).unwrap(), fib);
    }
}
