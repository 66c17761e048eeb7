//! The direction map `p_{S³}` on the compactified two-point configuration
//! space of `S³ = ℝ³ ∪ ∞`, with its boundary values.
//!
//! Near `∞` points are written `φ_∞(v) = v/‖v‖²`, so `φ_∞(μx) = x/μ` for a
//! unit `x`; a direction `x` at `∞` is the limit of `φ_∞(μx)` as `μ → 0⁺`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};

pub type V3 = Vector3<f64>;

/// Points closer than this (or directions shorter) are coincident.
pub const COINCIDENCE_TOL: f64 = 1e-14;

/// A point of the compactified space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfigPair {
    /// Two distinct points of `ℝ³`.
    Interior { x: V3, y: V3 },
    /// Collision at `x` along the direction `u` from the first point to the
    /// second.
    Diagonal { x: V3, u: V3 },
    /// First point at `∞` in the direction `x`, second point `y ∈ ℝ³`.
    InfinityFirst { x: V3, y: V3 },
    /// First point `x ∈ ℝ³`, second point at `∞` in the direction `y`.
    InfinitySecond { x: V3, y: V3 },
    /// Both points at `∞`, in the directions `(x, y)` of `(ℝ³)²`.
    BothInfinity { x: V3, y: V3 },
    /// Both points at `∞` in the direction `x`, colliding along `y`
    /// (`x`, `y` nonzero, normalized on use).
    DiagonalAtInfinity { x: V3, y: V3 },
}

pub fn phi_infinity(v: &V3) -> V3 {
    v / v.norm_squared()
}

fn unit(v: V3) -> Result<V3> {
    let n = v.norm();
    if n < COINCIDENCE_TOL || !n.is_finite() {
        return Err(Error::CoincidentPoints);
    }
    Ok(v / n)
}

/// `p_{S³}` on interior and boundary points.
pub fn p_s3_extended(p: &ConfigPair) -> Result<V3> {
    match *p {
        ConfigPair::Interior { x, y } => unit(y - x),
        ConfigPair::Diagonal { u, .. } => unit(u),
        ConfigPair::InfinityFirst { x, .. } => unit(-x),
        ConfigPair::InfinitySecond { y, .. } => unit(y),
        ConfigPair::BothInfinity { x, y } => {
            if x.norm() < COINCIDENCE_TOL || y.norm() < COINCIDENCE_TOL {
                return Err(Error::CoincidentPoints);
            }
            unit(x.norm_squared() * y - y.norm_squared() * x)
        }
        ConfigPair::DiagonalAtInfinity { x, y } => {
            let (x, y) = (unit(x)?, unit(y)?);
            unit(y - 2.0 * x.dot(&y) * x)
        }
    }
}

/// Interior configurations converging to a boundary point as `t → 0⁺`.
pub fn approach(p: &ConfigPair, t: f64) -> ConfigPair {
    match *p {
        ConfigPair::Interior { .. } => *p,
        ConfigPair::Diagonal { x, u } => ConfigPair::Interior { x, y: x + t * u },
        ConfigPair::InfinityFirst { x, y } => ConfigPair::Interior { x: phi_infinity(&(t * x)), y },
        ConfigPair::InfinitySecond { x, y } => ConfigPair::Interior { x, y: phi_infinity(&(t * y)) },
        ConfigPair::BothInfinity { x, y } => ConfigPair::Interior {
            x: phi_infinity(&(t * x)),
            y: phi_infinity(&(t * y)),
        },
        ConfigPair::DiagonalAtInfinity { x, y } => {
            let (x, y) = (x.normalize(), y.normalize());
            ConfigPair::Interior {
                x: phi_infinity(&(t * x)),
                y: phi_infinity(&(t * (x + t * y))),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCheck {
    pub kind: &'static str,
    /// `t_k = t₀ rᵏ`.
    pub parameters: Vec<f64>,
    /// `‖p(approach(t_k)) − p(boundary)‖`.
    pub residuals: Vec<f64>,
}

impl LimitCheck {
    pub fn last_residual(&self) -> f64 {
        *self.residuals.last().expect("nonempty")
    }

    /// The last residual is below `tol` and the sequence moved towards the
    /// boundary value, unless it was already exact up to rounding.
    pub fn converged(&self, tol: f64) -> bool {
        let first = self.residuals[0];
        let last = self.last_residual();
        last < tol && (last <= first || first < 1e-12)
    }
}

pub fn kind(p: &ConfigPair) -> &'static str {
    match p {
        ConfigPair::Interior { .. } => "interior",
        ConfigPair::Diagonal { .. } => "diagonal",
        ConfigPair::InfinityFirst { .. } => "infinity_first",
        ConfigPair::InfinitySecond { .. } => "infinity_second",
        ConfigPair::BothInfinity { .. } => "both_infinity",
        ConfigPair::DiagonalAtInfinity { .. } => "diagonal_at_infinity",
    }
}

/// Interior values along the geometric sequence `t₀ rᵏ`, `k < count`,
/// compared with the boundary value.
pub fn limit_check(p: &ConfigPair, t0: f64, ratio: f64, count: usize) -> Result<LimitCheck> {
    let target = p_s3_extended(p)?;
    let mut parameters = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut t = t0;
    for _ in 0..count {
        let v = p_s3_extended(&approach(p, t))?;
        parameters.push(t);
        residuals.push((v - target).norm());
        t *= ratio;
    }
    Ok(LimitCheck { kind: kind(p), parameters, residuals })
}
