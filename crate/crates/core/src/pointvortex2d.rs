//! Kirchhoff point vortices in the plane.
//!
//! With `H = -(1/4π) Σ_{j<k} κ_j κ_k ln|z_j - z_k|²` the motion is
//! `κ_j ẋ_j = ∂H/∂y_j`, `κ_j ẏ_j = -∂H/∂x_j`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Separation below which a step is rejected.
pub const COLLISION_THRESHOLD: f64 = 1e-6;

const MIDPOINT_TOL: f64 = 1e-12;
const MIDPOINT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfig2D {
    positions: Vec<[f64; 2]>,
    strengths: Vec<f64>,
}

impl VortexConfig2D {
    pub fn new(positions: Vec<[f64; 2]>, strengths: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("at least one vortex is required"));
        }
        if positions.len() != strengths.len() {
            return Err(Error::LengthMismatch {
                expected: positions.len(),
                got: strengths.len(),
            });
        }
        if let Some(j) = strengths.iter().position(|k| *k == 0.0 || !k.is_finite()) {
            return Err(Error::invalid(format!("vortex {j} has zero or non-finite strength")));
        }
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite vortex position"));
        }
        let cfg = VortexConfig2D {
            positions,
            strengths,
        };
        cfg.check_distinct()?;
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// Same strengths at new positions.
    pub fn with_positions(&self, positions: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(positions, self.strengths.clone())
    }

    fn check_distinct(&self) -> Result<()> {
        let p = &self.positions;
        for j in 0..p.len() {
            for k in j + 1..p.len() {
                if p[j] == p[k] {
                    return Err(Error::VortexCollision(j, k));
                }
            }
        }
        Ok(())
    }

    /// Smallest pairwise distance (infinite for a single vortex).
    pub fn min_separation(&self) -> f64 {
        min_separation(&self.positions)
    }
}

fn min_separation(p: &[[f64; 2]]) -> f64 {
    let mut best = f64::INFINITY;
    for j in 0..p.len() {
        for k in j + 1..p.len() {
            best = best.min((p[j][0] - p[k][0]).hypot(p[j][1] - p[k][1]));
        }
    }
    best
}

fn velocity_at(pos: &[[f64; 2]], kappa: &[f64]) -> Result<Vec<[f64; 2]>> {
    let n = pos.len();
    let mut out = vec![[0.0; 2]; n];
    for j in 0..n {
        for k in j + 1..n {
            let dx = pos[j][0] - pos[k][0];
            let dy = pos[j][1] - pos[k][1];
            let r2 = dx * dx + dy * dy;
            if r2 == 0.0 {
                return Err(Error::VortexCollision(j, k));
            }
            // Velocity induced at j by k is κ_k/(2π r²)·(-dy, dx).
            let c = 1.0 / (2.0 * PI * r2);
            out[j][0] -= kappa[k] * c * dy;
            out[j][1] += kappa[k] * c * dx;
            out[k][0] += kappa[j] * c * dy;
            out[k][1] -= kappa[j] * c * dx;
        }
    }
    Ok(out)
}

/// Velocities of all vortices from the closed-form pairwise sum.
pub fn kirchhoff_velocity(cfg: &VortexConfig2D) -> Result<Vec<[f64; 2]>> {
    velocity_at(&cfg.positions, &cfg.strengths)
}

pub fn kirchhoff_hamiltonian(cfg: &VortexConfig2D) -> Result<f64> {
    let (p, kappa) = (&cfg.positions, &cfg.strengths);
    let mut h = 0.0;
    for j in 0..p.len() {
        for k in j + 1..p.len() {
            let r2 = (p[j][0] - p[k][0]).powi(2) + (p[j][1] - p[k][1]).powi(2);
            if r2 == 0.0 {
                return Err(Error::VortexCollision(j, k));
            }
            h -= kappa[j] * kappa[k] * r2.ln();
        }
    }
    Ok(h / (4.0 * PI))
}

/// `{F, G} = Σ_j (1/κ_j)(∂F/∂x_j ∂G/∂y_j - ∂F/∂y_j ∂G/∂x_j)`.
pub fn poisson_bracket(cfg: &VortexConfig2D, grad_f: &[[f64; 2]], grad_g: &[[f64; 2]]) -> Result<f64> {
    for g in [grad_f, grad_g] {
        if g.len() != cfg.len() {
            return Err(Error::LengthMismatch {
                expected: cfg.len(),
                got: g.len(),
            });
        }
    }
    Ok(cfg
        .strengths
        .iter()
        .zip(grad_f.iter().zip(grad_g))
        .map(|(k, (f, g))| (f[0] * g[1] - f[1] * g[0]) / k)
        .sum())
}

/// First integrals: linear impulse `(Σκx, Σκy)` and angular impulse
/// `Σκ|z|²`.
pub fn impulses(cfg: &VortexConfig2D) -> (f64, f64, f64) {
    let mut px = 0.0;
    let mut py = 0.0;
    let mut i = 0.0;
    for (p, k) in cfg.positions.iter().zip(&cfg.strengths) {
        px += k * p[0];
        py += k * p[1];
        i += k * (p[0] * p[0] + p[1] * p[1]);
    }
    (px, py, i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
    ImplicitMidpoint,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Scheme::Rk4),
            "implicit_midpoint" | "implicit-midpoint" => Ok(Scheme::ImplicitMidpoint),
            _ => Err(Error::invalid(format!("unknown scheme {s:?}"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Rk4 => "rk4",
            Scheme::ImplicitMidpoint => "implicit_midpoint",
        })
    }
}

fn axpy(p: &[[f64; 2]], a: f64, v: &[[f64; 2]]) -> Vec<[f64; 2]> {
    p.iter()
        .zip(v)
        .map(|(p, v)| [p[0] + a * v[0], p[1] + a * v[1]])
        .collect()
}

fn monitor(p: &[[f64; 2]]) -> Result<()> {
    let d = min_separation(p);
    if d < COLLISION_THRESHOLD {
        return Err(Error::NearCollision(d));
    }
    Ok(())
}

/// Advances the configuration by `dt`.
pub fn step2d(cfg: &VortexConfig2D, dt: f64, scheme: Scheme) -> Result<VortexConfig2D> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be non-negative, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(cfg.clone());
    }
    let kappa = &cfg.strengths;
    let p0 = &cfg.positions;
    let next = match scheme {
        Scheme::Rk4 => {
            let k1 = velocity_at(p0, kappa)?;
            let p = axpy(p0, dt / 2.0, &k1);
            monitor(&p)?;
            let k2 = velocity_at(&p, kappa)?;
            let p = axpy(p0, dt / 2.0, &k2);
            monitor(&p)?;
            let k3 = velocity_at(&p, kappa)?;
            let p = axpy(p0, dt, &k3);
            monitor(&p)?;
            let k4 = velocity_at(&p, kappa)?;
            p0.iter()
                .enumerate()
                .map(|(j, p)| {
                    let s = |c: usize| k1[j][c] + 2.0 * k2[j][c] + 2.0 * k3[j][c] + k4[j][c];
                    [p[0] + dt / 6.0 * s(0), p[1] + dt / 6.0 * s(1)]
                })
                .collect::<Vec<_>>()
        }
        Scheme::ImplicitMidpoint => {
            // z₁ = z₀ + dt·v((z₀ + z₁)/2), solved by fixed-point iteration.
            let mut z1 = axpy(p0, dt, &velocity_at(p0, kappa)?);
            let mut residual = f64::INFINITY;
            let mut converged = false;
            for _ in 0..MIDPOINT_MAX_ITER {
                let mid: Vec<[f64; 2]> = p0
                    .iter()
                    .zip(&z1)
                    .map(|(a, b)| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])])
                    .collect();
                monitor(&mid)?;
                let z = axpy(p0, dt, &velocity_at(&mid, kappa)?);
                residual = z
                    .iter()
                    .zip(&z1)
                    .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
                    .fold(0.0, f64::max);
                z1 = z;
                if residual < MIDPOINT_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::IntegratorStalled {
                    residual,
                    iterations: MIDPOINT_MAX_ITER,
                });
            }
            z1
        }
    };
    monitor(&next)?;
    Ok(VortexConfig2D {
        positions: next,
        strengths: kappa.clone(),
    })
}

/// One row of the diagnostics series `t,H,Px,Py,I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub hamiltonian: f64,
    pub px: f64,
    pub py: f64,
    pub angular: f64,
}

pub fn diagnostics(cfg: &VortexConfig2D, t: f64) -> Result<Diagnostics> {
    let (px, py, angular) = impulses(cfg);
    Ok(Diagnostics {
        t,
        hamiltonian: kirchhoff_hamiltonian(cfg)?,
        px,
        py,
        angular,
    })
}

/// Integrates `steps` steps, returning the final state, the trajectory
/// (including the initial state) and the diagnostics series.
pub fn integrate(
    cfg: &VortexConfig2D,
    dt: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<(Vec<VortexConfig2D>, Vec<Diagnostics>)> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut diags = Vec::with_capacity(steps + 1);
    let mut cur = cfg.clone();
    diags.push(diagnostics(&cur, 0.0)?);
    states.push(cur.clone());
    for s in 1..=steps {
        cur = step2d(&cur, dt, scheme)?;
        diags.push(diagnostics(&cur, s as f64 * dt)?);
        states.push(cur.clone());
    }
    Ok((states, diags))
}
