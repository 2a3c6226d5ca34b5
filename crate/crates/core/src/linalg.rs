//! Small dense helpers on coordinate slices. Points and vectors live in
//! `Vector` (a heap `DVector`) at API boundaries; inner loops go through
//! these slice routines instead.

use nalgebra::DMatrix;

use crate::Vector;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    Vector::from_iterator(a.len(), a.iter().zip(b).map(|(x, y)| x - y))
}

pub fn midpoint(a: &[f64], b: &[f64]) -> Vector {
    Vector::from_iterator(a.len(), a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)))
}

/// Area of the parallelogram spanned by `u` and `w`, valid in any dimension.
pub fn parallelogram_area(u: &[f64], w: &[f64]) -> f64 {
    let uu = norm2(u);
    let ww = norm2(w);
    let uw = dot(u, w);
    (uu * ww - uw * uw).max(0.0).sqrt()
}

/// Cotangent of the angle between `u` and `w`; `None` when they are parallel.
pub fn cot(u: &[f64], w: &[f64]) -> Option<f64> {
    let s = parallelogram_area(u, w);
    if s <= 1e-300 || s <= 1e-14 * norm(u) * norm(w) {
        None
    } else {
        Some(dot(u, w) / s)
    }
}

/// Determinant of the square matrix whose columns are `cols`.
pub fn det(cols: &[&[f64]]) -> f64 {
    let n = cols.len();
    match n {
        2 => cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0],
        3 => {
            let (a, b, c) = (cols[0], cols[1], cols[2]);
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        }
        _ => DMatrix::from_fn(n, n, |r, c| cols[c][r]).determinant(),
    }
}

pub fn cross3(a: &[f64], b: &[f64]) -> Vector {
    Vector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Generalized cross product of `n - 1` vectors in Rⁿ: the vector `X` with
/// `X·z = det[v₁, …, vₙ₋₁, z]` for every `z`. Equals the Hodge star of
/// `v₁ ∧ … ∧ vₙ₋₁`.
pub fn hodge_cross(vs: &[&[f64]]) -> Vector {
    let n = vs.len() + 1;
    let mut out = Vector::zeros(n);
    let mut basis = vec![0.0; n];
    for i in 0..n {
        basis.iter_mut().for_each(|b| *b = 0.0);
        basis[i] = 1.0;
        let mut cols: Vec<&[f64]> = vs.to_vec();
        cols.push(&basis);
        out[i] = det(&cols);
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal family `tangent` in Rⁿ, built by Gram-Schmidt over the
/// standard basis (largest residuals first). The result depends only on the
/// subspace, not on the particular basis `tangent`.
pub fn orthonormal_complement(tangent: &[Vector], n: usize) -> Vec<Vector> {
    let k = n - tangent.len();
    // Residual of each coordinate axis after removing the tangent components.
    let mut residuals: Vec<(usize, Vector)> = (0..n)
        .map(|i| {
            let mut e = Vector::zeros(n);
            e[i] = 1.0;
            for t in tangent {
                let c = t[i];
                e.axpy(-c, t, 1.0);
            }
            (i, e)
        })
        .collect();
    let mut out: Vec<Vector> = Vec::with_capacity(k);
    while out.len() < k {
        // Re-orthogonalize remaining candidates against the accepted ones and
        // take the largest.
        let mut best: Option<(usize, f64)> = None;
        for (idx, (_, r)) in residuals.iter_mut().enumerate() {
            for b in &out {
                let c = r.dot(b);
                r.axpy(-c, b, 1.0);
            }
            let nr = r.norm();
            if best.is_none_or(|(_, bn)| nr > bn + 1e-14) {
                best = Some((idx, nr));
            }
        }
        let (idx, nr) = best.expect("complement dimension positive");
        let (_, mut r) = residuals.remove(idx);
        r /= nr;
        out.push(r);
    }
    out
}

/// Ordinary least squares of each column of `ys` against `xs`:
/// returns `(intercept, slope)` vectors.
pub fn linear_fit(xs: &[f64], ys: &[Vector]) -> (Vector, Vector) {
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let dim = ys[0].len();
    let mut ybar = Vector::zeros(dim);
    for y in ys {
        ybar += y;
    }
    ybar /= m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let mut slope = Vector::zeros(dim);
    for (x, y) in xs.iter().zip(ys) {
        slope.axpy(x - xbar, &(y - &ybar), 1.0);
    }
    slope /= sxx;
    let intercept = &ybar - &slope * xbar;
    (intercept, slope)
}

/// Relative misfit of a straight-line fit: RMS residual norm divided by the
/// change the fitted line predicts over the sampled abscissa range.
/// Returns 0 when both the residuals and the slope vanish.
pub fn fit_residual(xs: &[f64], ys: &[Vector], intercept: &Vector, slope: &Vector) -> f64 {
    let m = xs.len() as f64;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * *x).norm_squared())
        .sum::<f64>()
        / m)
        .sqrt();
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = slope.norm() * span;
    if rms <= 1e-14 * (1.0 + scale) {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        rms / scale
    }
}

/// Area of the unit sphere Sⁿ⁻¹ ⊂ Rⁿ, 2π^{n/2}/Γ(n/2).
pub fn unit_sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    assert!(n >= 1);
    let half = n as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_half_integer(n)
}

/// Γ(n/2) for a positive integer n.
fn gamma_half_integer(n: usize) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        // Γ(k + 1/2) = √π (2k)! / (4ᵏ k!)
        let k = (n - 1) / 2;
        let mut g = std::f64::consts::PI.sqrt();
        for j in 0..k {
            g *= j as f64 + 0.5;
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hodge_cross_matches_cross3() {
        let a = [0.3, -1.2, 2.0];
        let b = [1.1, 0.4, -0.7];
        let x = hodge_cross(&[&a, &b]);
        let c = cross3(&a, &b);
        assert!((x - c).norm() < 1e-14);
    }

    #[test]
    fn complement_is_orthonormal() {
        let t1 = Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0]) / 2f64.sqrt();
        let t2 = Vector::from_vec(vec![0.0, 0.0, 1.0, 1.0]) / 2f64.sqrt();
        let c = orthonormal_complement(&[t1.clone(), t2.clone()], 4);
        assert_eq!(c.len(), 2);
        for e in &c {
            assert!((e.norm() - 1.0).abs() < 1e-14);
            assert!(e.dot(&t1).abs() < 1e-14 && e.dot(&t2).abs() < 1e-14);
        }
        assert!(c[0].dot(&c[1]).abs() < 1e-14);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<Vector> = xs
            .iter()
            .map(|x| Vector::from_vec(vec![1.0 + 2.0 * x, -x]))
            .collect();
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a[0] - 1.0).abs() < 1e-12 && (b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] + 1.0).abs() < 1e-12);
        assert_eq!(fit_residual(&xs, &ys, &a, &b), 0.0);
    }
}
