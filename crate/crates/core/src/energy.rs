//! ε-regularized self-energy `E_ε = (C²/2) ∬_{|p−q|≥ε} |G(q, p)| μ μ` and
//! its logarithmic growth.

use std::collections::HashMap;

use crate::biotsavart::{check_eps_list, Carrier, MIN_EPS_OVER_H, MAX_FIT_RESIDUAL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::Vector;

/// `|G|` as a function of the squared distance.
#[inline]
fn green_abs_r2(n: usize, r2: f64, inv_norm: f64) -> f64 {
    match n {
        3 => inv_norm / r2.sqrt(),
        4 => inv_norm / r2,
        _ => inv_norm * r2.powf(1.0 - n as f64 / 2.0),
    }
}

/// `1 / ((n − 2) σ_{n−1})`.
fn green_norm(n: usize) -> f64 {
    1.0 / ((n - 2) as f64 * linalg::unit_sphere_area(n))
}

fn check_resolution(c: &impl Carrier, eps: f64) -> Result<()> {
    let min = MIN_EPS_OVER_H * c.spacing();
    if !(eps >= min) {
        return Err(Error::TruncationBelowResolution { eps, min });
    }
    Ok(())
}

/// Full double sum over element pairs (one-point rule per element) with
/// centroid separation at least `eps`. Positive by construction.
pub fn regularized_energy(c: &impl Carrier, eps: f64) -> Result<f64> {
    check_resolution(c, eps)?;
    let n = c.ambient_dim();
    if n < 3 {
        return Err(Error::invalid("energy needs ambient dimension at least 3"));
    }
    let nodes = c.nodes();
    let norm = green_norm(n);
    let eps2 = eps * eps;
    let mut total = 0.0;
    for (p, wp) in &nodes {
        let mut inner = 0.0;
        for (q, wq) in &nodes {
            let r2 = linalg::dist2(p.as_slice(), q.as_slice());
            if r2 >= eps2 {
                inner += wq * green_abs_r2(n, r2, norm);
            }
        }
        total += wp * inner;
    }
    let s = c.strength();
    Ok(0.5 * s * s * total)
}

/// Energy growth fit.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySlope {
    /// `d E_ε / d ln(1/ε)`.
    pub slope: f64,
    pub slope_per_volume: f64,
    pub fit_residual: f64,
    /// Radii in decreasing order.
    pub eps: Vec<f64>,
    /// `E_ε − E_{ε_max}` for each radius.
    pub increments: Vec<f64>,
}

/// Fits `E_ε` against `ln(1/ε)`. Only the differences `E_ε − E_{ε_max}`
/// are needed for the slope and the residual; they involve pairs closer
/// than `ε_max` only and are gathered with a uniform cell grid.
pub fn energy_slope(c: &impl Carrier, eps: &[f64]) -> Result<EnergySlope> {
    check_eps_list(eps)?;
    let mut eps = eps.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    check_resolution(c, *eps.last().unwrap())?;
    let n = c.ambient_dim();
    let nodes = c.nodes();
    let increments = pair_increments(&nodes, n, &eps);
    let s = c.strength();
    let incs: Vec<f64> = increments.iter().map(|x| 0.5 * s * s * x).collect();
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<Vector> = incs.iter().map(|y| Vector::from_element(1, *y)).collect();
    let (a, b) = linalg::linear_fit(&xs, &ys);
    let fit_residual = linalg::fit_residual(&xs, &ys, &a, &b);
    if !(fit_residual <= MAX_FIT_RESIDUAL) {
        return Err(Error::AsymptoticRegimeNotReached(fit_residual));
    }
    let slope = b[0];
    Ok(EnergySlope {
        slope,
        slope_per_volume: slope / c.volume(),
        fit_residual,
        eps,
        increments: incs,
    })
}

/// `Σ_{ε_k ≤ |p−q| < ε_0} w_p w_q |G|` for each radius `ε_k` (decreasing),
/// counting ordered pairs.
fn pair_increments(nodes: &[(Vector, f64)], n: usize, eps: &[f64]) -> Vec<f64> {
    let emax = eps[0];
    let emax2 = emax * emax;
    let thresholds2: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let norm = green_norm(n);
    let key = |p: &Vector| -> Vec<i64> { p.iter().map(|x| (x / emax).floor() as i64).collect() };
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, (p, _)) in nodes.iter().enumerate() {
        cells.entry(key(p)).or_default().push(i);
    }
    // Deterministic traversal order.
    let mut keys: Vec<&Vec<i64>> = cells.keys().collect();
    keys.sort();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|mut m| {
            (0..n)
                .map(|_| {
                    let d = (m % 3) as i64 - 1;
                    m /= 3;
                    d
                })
                .collect()
        })
        .collect();
    // bins[k]: pairs with ε_{k+1} ≤ r < ε_k.
    let mut bins = vec![0.0; eps.len()];
    let mut nb = vec![0i64; n];
    for k in keys {
        let own = &cells[k];
        for off in &offsets {
            for d in 0..n {
                nb[d] = k[d] + off[d];
            }
            // Visit each unordered cell pair once.
            if nb.as_slice() < k.as_slice() {
                continue;
            }
            let Some(other) = cells.get(&nb) else { continue };
            let same = nb.as_slice() == k.as_slice();
            for (a, &i) in own.iter().enumerate() {
                let (p, wp) = (&nodes[i].0, nodes[i].1);
                let start = if same { a + 1 } else { 0 };
                for &j in &other[start..] {
                    let r2 = linalg::dist2(p.as_slice(), nodes[j].0.as_slice());
                    if r2 >= emax2 || r2 < thresholds2[thresholds2.len() - 1] {
                        continue;
                    }
                    let mut b = 0;
                    while r2 < thresholds2[b + 1] {
                        b += 1;
                    }
                    bins[b] += 2.0 * wp * nodes[j].1 * green_abs_r2(n, r2, norm);
                }
            }
        }
    }
    let mut out = vec![0.0; eps.len()];
    for k in 1..eps.len() {
        out[k] = out[k - 1] + bins[k - 1];
    }
    out
}
