//! Singular vortex dynamics across codimensions.
//!
//! * [`pointvortex2d`] — Kirchhoff point vortices in the plane.
//! * [`filament3d`] — binormal flow of closed space curves, Hasimoto map.
//! * [`membrane_flow`] — skew-mean-curvature flow of surfaces in R⁴.
//! * [`biotsavart`] — velocity of filaments and membranes, ε-truncation and
//!   the localized-induction slope.
//! * [`energy`] — the ε-regularized self-energy and its logarithmic growth.
//! * [`symplectic`] — Kirillov–Kostant, Marsden–Weinstein and vortex-sheet
//!   forms, and the family-of-filaments sheet evolution.
//! * [`checks`] — acceptance criteria and fixture invariant suites.
//!
//! Everything is sequential and deterministic: identical inputs give
//! bit-identical outputs.

pub mod biotsavart;
pub mod checks;
pub mod energy;
pub mod error;
pub mod filament3d;
pub mod fixtures;
pub mod format;
pub mod geometry;
pub mod linalg;
pub mod membrane_flow;
pub mod pointvortex2d;
pub mod symplectic;

pub use error::{Error, Result};

/// Point or vector in Rⁿ.
pub type Vector = nalgebra::DVector<f64>;

/// Convenience constructor for a [`Vector`] from a slice.
pub fn vector(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}
