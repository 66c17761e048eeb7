//! Monte Carlo degree of maps out of `S³`.
//!
//! `S³ ⊂ ℍ` is oriented as the boundary of the unit ball, outward normal
//! first; at `q` the frame `(qi, qj, qk)` is positive and orthonormal.
//! Tangent vectors to `S³` at `p` are read in the frame `(pi, pj, pk)`,
//! tangent vectors to `SO(3)` at `R` in the body frame
//! `(R[e₁]×, R[e₂]×, R[e₃]×)`. The body frame agrees with the local
//! orientation of `SO(3)` as `S²×S¹` (axis, angle); see [`so3_volume`].
//!
//! The degree is `E[J]·vol(S³)/vol(target)` with `J` the Jacobian
//! determinant between these frames and `q` uniform on `S³`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use nalgebra::{Matrix3, Quaternion, Rotation3 as NaRotation, Unit, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::quaternion::{rho, UnitQuaternion};
use crate::error::{Error, Result};
use crate::rng;

/// Samples per random stream.
pub const CHUNK: usize = 4096;
/// Base step of the central differences; one Richardson step on `h, h/2`.
pub const FD_STEP: f64 = 1e-3;
/// `|J|` below this counts as a singular sample.
pub const SINGULAR_TOL: f64 = 1e-8;

pub const VOL_S3: f64 = 2.0 * PI * PI;

/// A map out of `S³`.
pub enum S3Map<'a> {
    Sphere(&'a (dyn Fn(&Quaternion<f64>) -> Quaternion<f64> + Sync)),
    Rotation(&'a (dyn Fn(&Quaternion<f64>) -> Matrix3<f64> + Sync)),
}

/// The maps known to the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedMap {
    Identity,
    Constant,
    /// `q ↦ q²` on `S³`.
    Square,
    Rho,
    /// `q ↦ ρ(q²)`.
    RhoSquared,
    G3,
}

impl NamedMap {
    pub const ALL: [NamedMap; 6] = [
        NamedMap::Identity,
        NamedMap::Constant,
        NamedMap::Square,
        NamedMap::Rho,
        NamedMap::RhoSquared,
        NamedMap::G3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedMap::Identity => "identity",
            NamedMap::Constant => "constant",
            NamedMap::Square => "square",
            NamedMap::Rho => "rho",
            NamedMap::RhoSquared => "rho_squared",
            NamedMap::G3 => "g3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::MalformedInput(format!("unknown map {s:?}")))
    }
}

/// Unit quaternion from an arbitrary nonzero one; maps are evaluated off
/// the sphere by the finite differences only through this.
fn unit(q: &Quaternion<f64>) -> UnitQuaternion {
    UnitQuaternion::normalize(*q).expect("nonzero")
}

fn id_map(q: &Quaternion<f64>) -> Quaternion<f64> {
    *q
}
fn constant_map(_: &Quaternion<f64>) -> Quaternion<f64> {
    Quaternion::new(0.0, 0.0, 0.0, 1.0)
}
fn square_map(q: &Quaternion<f64>) -> Quaternion<f64> {
    q * q
}
fn rho_map(q: &Quaternion<f64>) -> Matrix3<f64> {
    rho(&unit(q))
}
fn rho_squared_map(q: &Quaternion<f64>) -> Matrix3<f64> {
    rho(&unit(&(q * q)))
}
fn g3_map(q: &Quaternion<f64>) -> Matrix3<f64> {
    super::quaternion::g3(&unit(q))
}

pub fn named(map: NamedMap) -> S3Map<'static> {
    match map {
        NamedMap::Identity => S3Map::Sphere(&id_map),
        NamedMap::Constant => S3Map::Sphere(&constant_map),
        NamedMap::Square => S3Map::Sphere(&square_map),
        NamedMap::Rho => S3Map::Rotation(&rho_map),
        NamedMap::RhoSquared => S3Map::Rotation(&rho_squared_map),
        NamedMap::G3 => S3Map::Rotation(&g3_map),
    }
}

fn unit_axis(a: usize) -> Quaternion<f64> {
    let mut v = [0.0; 3];
    v[a] = 1.0;
    Quaternion::new(0.0, v[0], v[1], v[2])
}

/// `q·exp(t e_a)`: the unit-speed great circle through `q` with velocity
/// `q e_a`.
fn along(q: &Quaternion<f64>, a: usize, t: f64) -> Quaternion<f64> {
    let e = unit_axis(a);
    q * (Quaternion::new(t.cos(), 0.0, 0.0, 0.0) + e * t.sin())
}

fn richardson<T>(f: impl Fn(f64) -> T) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let h = FD_STEP;
    let d1 = f(h) * (1.0 / (2.0 * h));
    let d2 = f(h / 2.0) * (1.0 / h);
    d2 * (4.0 / 3.0) + d1 * (-1.0 / 3.0)
}

/// Jacobian determinant of `map` at `q` between the frames of the module
/// docs.
pub fn jacobian(map: &S3Map<'_>, q: &Quaternion<f64>) -> f64 {
    let mut cols = Matrix3::zeros();
    match map {
        S3Map::Sphere(f) => {
            let p = f(q);
            let pc = p.conjugate();
            for a in 0..3 {
                let d = richardson(|h| f(&along(q, a, h)) - f(&along(q, a, -h)));
                let c = pc * d;
                cols.set_column(a, &Vector3::new(c.i, c.j, c.k));
            }
        }
        S3Map::Rotation(f) => {
            let r = f(q);
            for a in 0..3 {
                let d = richardson(|h| f(&along(q, a, h)) - f(&along(q, a, -h)));
                let x = r.transpose() * d;
                let s = (x - x.transpose()) * 0.5;
                cols.set_column(a, &Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)]));
            }
        }
    }
    cols.determinant()
}

/// Volume of `SO(3)` for the metric making the body frame orthonormal,
/// integrated over the axis-angle chart `(α, β, θ) ↦ exp(θ n(α, β))` by
/// product Gauss–Legendre quadrature, with the chart Jacobian measured by
/// finite differences in the body frame. Also returns the sign of that
/// Jacobian when the chart is oriented as `S²×S¹`: `+1` means the body
/// frame is positive.
pub fn so3_volume(nodes: usize) -> (f64, f64) {
    let quad = GaussLegendre::new(nodes.max(2)).expect("at least two nodes");
    let rot = |alpha: f64, beta: f64, theta: f64| -> Matrix3<f64> {
        let n = Vector3::new(alpha.sin() * beta.cos(), alpha.sin() * beta.sin(), alpha.cos());
        *NaRotation::from_axis_angle(&Unit::new_normalize(n), theta).matrix()
    };
    let body = |r: &Matrix3<f64>, d: Matrix3<f64>| {
        let x = r.transpose() * d;
        Vector3::new(x[(2, 1)], x[(0, 2)], x[(1, 0)])
    };
    let mut vol = 0.0;
    let mut min_sign = f64::INFINITY;
    let mut max_sign = f64::NEG_INFINITY;
    for &(theta, wt) in quad.as_node_weight_pairs() {
        let theta = (theta + 1.0) * PI / 2.0;
        let wt = wt * PI / 2.0;
        for &(alpha, wa) in quad.as_node_weight_pairs() {
            let alpha = (alpha + 1.0) * PI / 2.0;
            let wa = wa * PI / 2.0;
            for &(beta, wb) in quad.as_node_weight_pairs() {
                let beta = (beta + 1.0) * PI;
                let wb = wb * PI;
                let r = rot(alpha, beta, theta);
                // (∂α, ∂β) is positive on S² with the outward normal first.
                let da = richardson(|h| rot(alpha + h, beta, theta) - rot(alpha - h, beta, theta));
                let db = richardson(|h| rot(alpha, beta + h, theta) - rot(alpha, beta - h, theta));
                let dt = richardson(|h| rot(alpha, beta, theta + h) - rot(alpha, beta, theta - h));
                let j = Matrix3::from_columns(&[body(&r, da), body(&r, db), body(&r, dt)]).determinant();
                vol += wt * wa * wb * j.abs();
                min_sign = min_sign.min(j);
                max_sign = max_sign.max(j);
            }
        }
    }
    let sign = if min_sign > 0.0 {
        1.0
    } else if max_sign < 0.0 {
        -1.0
    } else {
        0.0
    };
    (vol, sign)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Nearest integer.
    pub integer: i64,
    /// `0.5 − |estimate − integer|`: distance to the rounding boundary.
    pub confidence: f64,
    pub samples: usize,
    /// Samples with `|J| < SINGULAR_TOL`; they contribute their (near zero)
    /// Jacobian like any other sample.
    pub singular_samples: usize,
    pub target_volume: f64,
    /// Sign of the body frame against the `S²×S¹` orientation (`SO(3)`
    /// targets only).
    pub orientation_sign: f64,
}

/// Nodes per axis of the `SO(3)` volume quadrature.
pub const SO3_VOLUME_NODES: usize = 24;

/// Monte Carlo degree with `samples` uniform points; chunk `k` of `CHUNK`
/// samples uses random stream `k` of `seed`.
pub fn map_degree(map: &S3Map<'_>, samples: usize, seed: u64) -> Result<DegreeEstimate> {
    if samples < 2 {
        return Err(Error::MalformedInput("at least two samples are needed".into()));
    }
    let (target_volume, orientation_sign) = match map {
        S3Map::Sphere(_) => (VOL_S3, 1.0),
        S3Map::Rotation(_) => so3_volume(SO3_VOLUME_NODES),
    };
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let n = CHUNK.min(samples - k * CHUNK);
            let (mut s, mut s2, mut singular) = (0.0, 0.0, 0);
            for _ in 0..n {
                let q = UnitQuaternion::random(&mut r).quaternion();
                let j = jacobian(map, &q);
                if j.abs() < SINGULAR_TOL {
                    singular += 1;
                }
                s += j;
                s2 += j * j;
            }
            (s, s2, singular)
        })
        .collect();
    let (mut s, mut s2, mut singular) = (0.0, 0.0, 0);
    for (a, b, c) in parts {
        s += a;
        s2 += b;
        singular += c;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let scale = orientation_sign * VOL_S3 / target_volume;
    let estimate = mean * scale;
    let integer = estimate.round() as i64;
    Ok(DegreeEstimate {
        estimate,
        stderr: (var / n).sqrt() * scale.abs(),
        integer,
        confidence: 0.5 - (estimate - integer as f64).abs(),
        samples,
        singular_samples: singular,
        target_volume,
        orientation_sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_on_s3_is_positive() {
        let mut r = rng::master(31);
        for _ in 0..20 {
            let q = UnitQuaternion::random(&mut r).quaternion();
            let cols: Vec<Quaternion<f64>> =
                std::iter::once(q).chain((0..3).map(|a| q * unit_axis(a))).collect();
            // Rows in the order (1, i, j, k); nalgebra stores (i, j, k, w).
            let m = nalgebra::Matrix4::from_fn(|i, j| cols[j].coords[(i + 3) % 4]);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn so3_volume_is_eight_pi_squared() {
        let (v, sign) = so3_volume(SO3_VOLUME_NODES);
        assert!((v - 8.0 * PI * PI).abs() < 1e-6, "{v}");
        assert_eq!(sign, 1.0);
    }

    #[test]
    fn jacobian_of_rho_is_constant() {
        let mut r = rng::master(32);
        for _ in 0..50 {
            let q = UnitQuaternion::random(&mut r).quaternion();
            assert!((jacobian(&named(NamedMap::Rho), &q) - 8.0).abs() < 1e-8);
            assert!((jacobian(&named(NamedMap::Identity), &q) - 1.0).abs() < 1e-8);
            assert!(jacobian(&named(NamedMap::Constant), &q).abs() < 1e-12);
        }
    }

    #[test]
    fn small_sample_degrees() {
        let id = map_degree(&named(NamedMap::Identity), 20_000, 1).unwrap();
        assert!((id.estimate - 1.0).abs() < 0.02);
        let c = map_degree(&named(NamedMap::Constant), 2_000, 1).unwrap();
        assert_eq!(c.estimate, 0.0);
        assert_eq!(c.singular_samples, 2_000);
        let rho = map_degree(&named(NamedMap::Rho), 20_000, 1).unwrap();
        assert!((rho.estimate - 2.0).abs() < 0.05);
        let g = map_degree(&named(NamedMap::G3), 20_000, 1).unwrap();
        assert!((g.estimate + 2.0).abs() < 0.05);
        let sq = map_degree(&named(NamedMap::Square), 50_000, 1).unwrap();
        assert!((sq.estimate - 2.0).abs() < 5.0 * sq.stderr + 0.02, "{sq:?}");
    }

    #[test]
    fn estimates_are_deterministic() {
        let a = map_degree(&named(NamedMap::RhoSquared), 10_000, 9).unwrap();
        let b = map_degree(&named(NamedMap::RhoSquared), 10_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.stderr > 0.0);
    }
}
