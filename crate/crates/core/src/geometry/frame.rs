use crate::error::{Error, Result};
use crate::linalg;
use crate::Vector;

/// Tolerance for the `rotate_j` plane-membership check.
pub const PLANE_TOLERANCE: f64 = 1e-8;

/// Oriented orthonormal basis of a 2-dimensional normal space, together with
/// the oriented tangent basis it complements.
///
/// `orientation_sign` is the sign of `det[e1, t₁, …, t_l, e2]`. The quarter
/// turn `J` rotates `e1` into `orientation_sign · e2`, so that
/// `(w, t₁, …, t_l, J w)` is positively oriented for every unit normal `w`;
/// equivalently `J w = ⋆(w ∧ t₁ ∧ … ∧ t_l)`. For a curve in R³ this is
/// `J w = w × t`, which turns `-k n` into `k b`; for a surface in R⁴ the rule
/// coincides with "(t₁, t₂, e1, J e1) positive".
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFrame {
    pub e1: Vector,
    pub e2: Vector,
    pub orientation_sign: f64,
    pub tangent: Vec<Vector>,
}

impl NormalFrame {
    /// Builds the frame complementing an oriented orthonormal tangent basis of
    /// dimension `n - 2` in Rⁿ.
    pub fn from_tangent(tangent: Vec<Vector>) -> Self {
        let n = tangent[0].len();
        assert_eq!(tangent.len() + 2, n, "normal space must be 2-dimensional");
        let mut c = linalg::orthonormal_complement(&tangent, n).into_iter();
        let e1 = c.next().unwrap();
        let e2 = c.next().unwrap();
        let mut cols: Vec<&[f64]> = Vec::with_capacity(n);
        cols.push(e1.as_slice());
        cols.extend(tangent.iter().map(|t| t.as_slice()));
        cols.push(e2.as_slice());
        let orientation_sign = if linalg::det(&cols) >= 0.0 { 1.0 } else { -1.0 };
        NormalFrame {
            e1,
            e2,
            orientation_sign,
            tangent,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.e1.len()
    }

    /// Orthogonal projection onto the normal plane.
    pub fn project(&self, w: &[f64]) -> Vector {
        let a = linalg::dot(w, self.e1.as_slice());
        let b = linalg::dot(w, self.e2.as_slice());
        &self.e1 * a + &self.e2 * b
    }

    /// Norm of the component of `w` outside the normal plane.
    pub fn normal_residual(&self, w: &[f64]) -> f64 {
        let p = self.project(w);
        linalg::dist(w, p.as_slice())
    }

    /// `J ∘ Proj_N`: the quarter turn of the normal component of `w`.
    pub fn rotate_projected(&self, w: &[f64]) -> Vector {
        let a = linalg::dot(w, self.e1.as_slice());
        let b = linalg::dot(w, self.e2.as_slice());
        (&self.e1 * (-b) + &self.e2 * a) * self.orientation_sign
    }

    /// Projector onto the normal plane as a dense matrix, for comparing
    /// planes independently of the chosen basis.
    pub fn projector(&self) -> nalgebra::DMatrix<f64> {
        &self.e1 * self.e1.transpose() + &self.e2 * self.e2.transpose()
    }
}

/// Positive quarter turn of a normal vector `w` in the oriented plane of
/// `frame`: `a e1 + b e2 ↦ s (-b e1 + a e2)`.
pub fn rotate_j(frame: &NormalFrame, w: &Vector) -> Result<Vector> {
    let residual = frame.normal_residual(w.as_slice());
    if residual > PLANE_TOLERANCE * w.norm().max(1.0) {
        return Err(Error::VectorNotNormal(residual));
    }
    Ok(frame.rotate_projected(w.as_slice()))
}
