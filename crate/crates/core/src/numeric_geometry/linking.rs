//! Gauss linking integral of two closed curves and an independent
//! crossing-count oracle.
//!
//! `lk(K₁, K₂) = (1/4π) ∬ ⟨G, ∂_sG × ∂_tG⟩ ds dt` with
//! `G(s, t) = (K₂(t) − K₁(s))/‖K₂(t) − K₁(s)‖`, which expands to
//! `(1/4π) ∬ ⟨K₁ − K₂, K₁′ × K₂′⟩/‖K₁ − K₂‖³ ds dt`.

use std::f64::consts::PI;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type V3 = Vector3<f64>;

/// Tolerance on the endpoint gap of a closed curve.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Curves closer than this are rejected.
pub const MIN_CURVE_DISTANCE: f64 = 1e-6;
pub const DEFAULT_NODES: usize = 256;
/// Refinement stops at this many nodes per curve.
pub const MAX_NODES: usize = 4096;
/// Gauss–Legendre nodes per panel of a smooth curve.
const PANEL_NODES: usize = 8;

type CurveFn = Arc<dyn Fn(f64) -> (V3, V3) + Send + Sync>;

/// A closed curve parametrized by `[0, 1]`.
#[derive(Clone)]
pub enum ParametricCurve {
    /// Positively oriented around `normal` (unit).
    Circle { center: V3, normal: V3, radius: f64 },
    /// Closed polygon through the vertices, back to the first one.
    Polygon(Vec<V3>),
    /// Position and velocity.
    Closed(CurveFn),
    /// The base curve traversed `k` times.
    Repeated(Box<ParametricCurve>, u32),
}

impl std::fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParametricCurve::Circle { center, normal, radius } => f
                .debug_struct("Circle")
                .field("center", center)
                .field("normal", normal)
                .field("radius", radius)
                .finish(),
            ParametricCurve::Polygon(v) => write!(f, "Polygon({} vertices)", v.len()),
            ParametricCurve::Closed(_) => write!(f, "Closed(..)"),
            ParametricCurve::Repeated(c, k) => write!(f, "Repeated({c:?}, {k})"),
        }
    }
}

/// Curve JSON: `{"samples": [[x,y,z], ...]}` with the last sample equal to
/// the first, or `{"kind": "circle", "center": [..], "normal": [..],
/// "radius": r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveJson {
    Samples {
        samples: Vec<[f64; 3]>,
    },
    Circle {
        kind: CircleKind,
        center: [f64; 3],
        normal: [f64; 3],
        radius: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleKind {
    Circle,
}

/// Link JSON: `{"components": [curve, curve]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkJson {
    pub components: Vec<CurveJson>,
}

fn v3(a: [f64; 3]) -> V3 {
    V3::new(a[0], a[1], a[2])
}

/// A unit vector orthogonal to the unit vector `n`.
fn orthogonal(n: &V3) -> V3 {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        V3::x()
    } else if n.y.abs() <= n.z.abs() {
        V3::y()
    } else {
        V3::z()
    };
    n.cross(&axis).normalize()
}

impl ParametricCurve {
    pub fn circle(center: V3, normal: V3, radius: f64) -> Result<Self> {
        let n = normal.norm();
        if n == 0.0 || !n.is_finite() || radius <= 0.0 || !radius.is_finite() {
            return Err(Error::MalformedInput("circle needs a nonzero normal and a positive radius".into()));
        }
        Ok(ParametricCurve::Circle { center, normal: normal / n, radius })
    }

    /// Closed polygon from samples whose last entry repeats the first.
    pub fn from_samples(samples: &[V3]) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::MalformedInput("a sampled curve needs at least 3 distinct samples".into()));
        }
        let gap = (samples[samples.len() - 1] - samples[0]).norm();
        if gap >= CLOSURE_TOL {
            return Err(Error::NotClosed(gap));
        }
        Ok(ParametricCurve::Polygon(samples[..samples.len() - 1].to_vec()))
    }

    /// Closed-form curve with its velocity; closure is checked at the ends.
    pub fn closed(f: impl Fn(f64) -> (V3, V3) + Send + Sync + 'static) -> Result<Self> {
        let gap = (f(1.0).0 - f(0.0).0).norm();
        if gap >= CLOSURE_TOL {
            return Err(Error::NotClosed(gap));
        }
        Ok(ParametricCurve::Closed(Arc::new(f)))
    }

    pub fn from_json(j: &CurveJson) -> Result<Self> {
        match j {
            CurveJson::Samples { samples } => {
                Self::from_samples(&samples.iter().map(|&s| v3(s)).collect::<Vec<_>>())
            }
            CurveJson::Circle { center, normal, radius, .. } => {
                Self::circle(v3(*center), v3(*normal), *radius)
            }
        }
    }

    pub fn repeated(&self, k: u32) -> Self {
        ParametricCurve::Repeated(Box::new(self.clone()), k)
    }

    /// Position and velocity at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> (V3, V3) {
        match self {
            ParametricCurve::Circle { center, normal, radius } => {
                let u = orthogonal(normal);
                let v = normal.cross(&u);
                let a = 2.0 * PI * t;
                (
                    center + *radius * (a.cos() * u + a.sin() * v),
                    2.0 * PI * radius * (-a.sin() * u + a.cos() * v),
                )
            }
            ParametricCurve::Polygon(vs) => {
                let n = vs.len();
                let x = t.rem_euclid(1.0) * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let s = x - i as f64;
                let (a, b) = (vs[i], vs[(i + 1) % n]);
                (a + s * (b - a), (b - a) * n as f64)
            }
            ParametricCurve::Closed(f) => f(t),
            ParametricCurve::Repeated(c, k) => {
                let k = *k as f64;
                let (p, d) = c.eval((k * t).rem_euclid(1.0));
                (p, k * d)
            }
        }
    }

    /// The image under `x ↦ r x + b`.
    pub fn transformed(&self, r: &Matrix3<f64>, b: &V3) -> Self {
        match self {
            ParametricCurve::Circle { center, normal, radius } => ParametricCurve::Circle {
                center: r * center + b,
                normal: (r * normal).normalize(),
                radius: *radius,
            },
            ParametricCurve::Polygon(vs) => ParametricCurve::Polygon(vs.iter().map(|v| r * v + b).collect()),
            ParametricCurve::Closed(f) => {
                let (f, r, b) = (f.clone(), *r, *b);
                ParametricCurve::Closed(Arc::new(move |t| {
                    let (p, d) = f(t);
                    (r * p + b, r * d)
                }))
            }
            ParametricCurve::Repeated(c, k) => ParametricCurve::Repeated(Box::new(c.transformed(r, b)), *k),
        }
    }

    /// Polygon vertices of the curve, if it is one (through repetitions).
    fn polygon(&self) -> Option<(&[V3], u32)> {
        match self {
            ParametricCurve::Polygon(vs) => Some((vs, 1)),
            ParametricCurve::Repeated(c, k) => c.polygon().map(|(v, j)| (v, j * k)),
            _ => None,
        }
    }

    /// Composite Gauss–Legendre nodes `(point, weight · velocity)` with at
    /// least `n` nodes: one panel per polygon edge, otherwise panels of
    /// `PANEL_NODES` nodes on equal parameter intervals.
    pub fn quadrature(&self, n: usize) -> Vec<(V3, V3)> {
        let (panels, per_panel) = match self.polygon() {
            Some((vs, k)) => {
                let edges = vs.len() * k as usize;
                (edges, n.div_ceil(edges).max(2))
            }
            None => (n.div_ceil(PANEL_NODES).max(1), PANEL_NODES),
        };
        let gl = GaussLegendre::new(per_panel).expect("at least two nodes");
        let mut rule = gl.as_node_weight_pairs().to_vec();
        rule.sort_by(|a, b| a.0.total_cmp(&b.0));
        let h = 1.0 / panels as f64;
        let mut out = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let a = p as f64 * h;
            for &(x, w) in &rule {
                let t = a + (x + 1.0) * h / 2.0;
                let (pt, d) = self.eval(t);
                out.push((pt, d * (w * h / 2.0)));
            }
        }
        out
    }

    /// `samples` points at equal parameter steps (the vertices of a polygon).
    pub fn polyline(&self, samples: usize) -> Vec<V3> {
        if let Some((vs, 1)) = self.polygon() {
            return vs.to_vec();
        }
        (0..samples).map(|i| self.eval(i as f64 / samples as f64).0).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkingEstimate {
    pub estimate: f64,
    /// `|I(n) − I(n/2)|`, an a-posteriori quadrature error.
    pub stderr: f64,
    pub integer: i64,
    /// `0.5 − |estimate − integer|`.
    pub confidence: f64,
    /// Nodes per curve after refinement.
    pub nodes: usize,
    /// Smallest distance between quadrature nodes of the two curves.
    pub min_distance: f64,
}

fn double_sum(a: &[(V3, V3)], b: &[(V3, V3)]) -> f64 {
    let mut s = 0.0;
    for (x, dx) in a {
        for (y, dy) in b {
            let d = x - y;
            let r = d.norm();
            s += d.dot(&dx.cross(dy)) / (r * r * r);
        }
    }
    s / (4.0 * PI)
}

fn spacing(q: &[(V3, V3)]) -> f64 {
    let n = q.len();
    (0..n).map(|i| (q[(i + 1) % n].0 - q[i].0).norm()).fold(0.0, f64::max)
}

fn min_distance(a: &[(V3, V3)], b: &[(V3, V3)]) -> f64 {
    let mut m = f64::INFINITY;
    for (x, _) in a {
        for (y, _) in b {
            m = m.min((x - y).norm());
        }
    }
    m
}

/// The Gauss integral with `nodes` nodes per curve, doubled while the
/// curves come within ten node spacings of each other. Curves still that
/// close at `MAX_NODES` count as too close.
pub fn gauss_linking(k1: &ParametricCurve, k2: &ParametricCurve, nodes: usize) -> Result<LinkingEstimate> {
    let mut n = nodes.max(4);
    loop {
        let a = k1.quadrature(n);
        let b = k2.quadrature(n);
        let dist = min_distance(&a, &b);
        if dist < MIN_CURVE_DISTANCE {
            return Err(Error::CurvesTooClose(dist));
        }
        if dist < 10.0 * spacing(&a).max(spacing(&b)) {
            if 2 * n > MAX_NODES {
                // Not resolvable at the finest resolution.
                return Err(Error::CurvesTooClose(dist));
            }
            n *= 2;
            continue;
        }
        let estimate = double_sum(&a, &b);
        let coarse = double_sum(&k1.quadrature(n / 2), &k2.quadrature(n / 2));
        let integer = estimate.round() as i64;
        return Ok(LinkingEstimate {
            estimate,
            stderr: (estimate - coarse).abs(),
            integer,
            confidence: 0.5 - (estimate - integer as f64).abs(),
            nodes: n,
            min_distance: dist,
        });
    }
}

/// Stereographic image, from `(0, 0, 0, 1)`, of the Hopf fiber
/// `{(e^{iθ}z₁, e^{iθ}z₂)}` through the unit vector `(z₁, z₂) ∈ ℂ²`.
pub fn hopf_fiber(z1: Complex64, z2: Complex64) -> Result<ParametricCurve> {
    let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
    let (z1, z2) = (z1 / n, z2 / n);
    if z2.norm() > 1.0 - 1e-9 {
        return Err(Error::NotApplicable("the fiber through the pole is a line".into()));
    }
    ParametricCurve::closed(move |t| {
        let e = Complex64::from_polar(1.0, 2.0 * PI * t);
        let de = Complex64::new(0.0, 2.0 * PI) * e;
        let (a, b) = (e * z1, e * z2);
        let (da, db) = (de * z1, de * z2);
        let den = 1.0 - b.im;
        let p = V3::new(a.re, a.im, b.re) / den;
        let dp = V3::new(da.re, da.im, db.re) / den + p * (db.im / den);
        (p, dp)
    })
}

/// Fibers over `(1, 0)` and `(1, 1)/√2`.
pub fn hopf_pair() -> (ParametricCurve, ParametricCurve) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    (
        hopf_fiber(one, zero).expect("regular fiber"),
        hopf_fiber(one, one).expect("regular fiber"),
    )
}

/// Two unit circles in parallel planes at height 0 and 3.
pub fn split_pair() -> (ParametricCurve, ParametricCurve) {
    (
        ParametricCurve::Circle { center: V3::zeros(), normal: V3::z(), radius: 1.0 },
        ParametricCurve::Circle { center: V3::new(0.3, 0.0, 3.0), normal: V3::z(), radius: 1.0 },
    )
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> V3 {
    loop {
        let v = V3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

/// A uniformly random rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let q = super::quaternion::UnitQuaternion::random(rng);
    super::quaternion::rho(&q)
}

/// Sign of the crossings where `b` passes over `a` when seen from `+e`, for
/// segment pairs of the two closed polylines. `None` when the projection is
/// too close to degenerate.
fn crossings_seen_from(a: &[V3], b: &[V3], e: &V3) -> Option<i64> {
    const EDGE: f64 = 1e-4;
    let u = orthogonal(e);
    let v = e.cross(&u);
    let pr = |x: &V3| (x.dot(&u), x.dot(&v));
    let mut total = 0i64;
    for i in 0..a.len() {
        let (p0, p1) = (a[i], a[(i + 1) % a.len()]);
        let (ax, ay) = pr(&p0);
        let (adx, ady) = {
            let (x, y) = pr(&p1);
            (x - ax, y - ay)
        };
        for j in 0..b.len() {
            let (q0, q1) = (b[j], b[(j + 1) % b.len()]);
            let (bx, by) = pr(&q0);
            let (bdx, bdy) = {
                let (x, y) = pr(&q1);
                (x - bx, y - by)
            };
            let den = adx * bdy - ady * bdx;
            let scale = (adx.hypot(ady) * bdx.hypot(bdy)).max(f64::MIN_POSITIVE);
            let (rx, ry) = (bx - ax, by - ay);
            if den.abs() < 1e-9 * scale {
                // Parallel projections only matter if they overlap.
                if (rx * ady - ry * adx).abs() < 1e-9 * scale.sqrt() {
                    return None;
                }
                continue;
            }
            let s = (rx * bdy - ry * bdx) / den;
            let t = (rx * ady - ry * adx) / den;
            let inside = |x: f64| (-EDGE..=1.0 + EDGE).contains(&x);
            if !inside(s) || !inside(t) {
                continue;
            }
            if s < EDGE || s > 1.0 - EDGE || t < EDGE || t > 1.0 - EDGE {
                return None;
            }
            let x = p0 + s * (p1 - p0);
            let y = q0 + t * (q1 - q0);
            if y.dot(e) > x.dot(e) {
                let sign = e.dot(&(q1 - q0).cross(&(p1 - p0)));
                total += if sign > 0.0 { 1 } else { -1 };
            }
        }
    }
    Some(total)
}

/// Linking number from signed crossings in a random projection of
/// polylines with `samples` vertices (polygons keep their own vertices):
/// the count of `K₂`-over-`K₁` crossings must agree with the count seen
/// from the opposite side. The projection is redrawn while degenerate.
pub fn crossing_count_linking<R: Rng + ?Sized>(
    k1: &ParametricCurve,
    k2: &ParametricCurve,
    samples: usize,
    rng: &mut R,
) -> Result<i64> {
    let a = k1.polyline(samples);
    let b = k2.polyline(samples);
    for _ in 0..100 {
        let e = random_unit(rng);
        let (Some(up), Some(down)) = (crossings_seen_from(&a, &b, &e), crossings_seen_from(&a, &b, &-e)) else {
            continue;
        };
        if up != down {
            return Err(Error::InvariantViolation(format!(
                "crossing counts disagree between the two sides ({up} vs {down})"
            )));
        }
        return Ok(up);
    }
    Err(Error::NotApplicable("no generic projection found".into()))
}

/// A random link sampled as two closed polygons: `K₁` a perturbed round
/// circle and `K₂` a curve on a torus around it, winding `q` times along and
/// `p` times around the core (`gcd(p, q) = 1` or `p = 0`), possibly moved
/// apart, then a random rigid motion.
pub fn random_sampled_link<R: Rng + ?Sized>(rng: &mut R, samples: usize) -> (ParametricCurve, ParametricCurve) {
    let p: i32 = rng.random_range(-3..=3);
    let q: i32 = if p.abs() > 1 && p.abs() % 2 == 1 { rng.random_range(1..=2) } else { 1 };
    let split = rng.random_bool(0.15);
    let big = 2.0;
    let tube = rng.random_range(0.5..0.8);
    let amp: Vec<f64> = (0..6).map(|_| rng.random_range(-0.06..0.06)).collect();
    let wobble = move |t: f64| {
        let a = 2.0 * PI * t;
        V3::new(
            amp[0] * (2.0 * a).cos() + amp[1] * (3.0 * a).sin(),
            amp[2] * (2.0 * a).sin() + amp[3] * (3.0 * a).cos(),
            amp[4] * (2.0 * a).cos() + amp[5] * a.sin(),
        )
    };
    let w1 = wobble.clone();
    let core = move |t: f64| {
        let a = 2.0 * PI * t;
        V3::new(big * a.cos(), big * a.sin(), 0.0) + w1(t)
    };
    let offset = if split { V3::new(0.0, 0.0, 4.0) } else { V3::zeros() };
    let torus = move |t: f64| {
        let a = 2.0 * PI * q as f64 * t;
        let b = 2.0 * PI * p as f64 * t;
        V3::new((big + tube * b.cos()) * a.cos(), (big + tube * b.cos()) * a.sin(), tube * b.sin())
            + wobble(q as f64 * t)
            + offset
    };
    let r = random_rotation(rng);
    let shift = 3.0 * random_unit(rng);
    let sample = |f: &dyn Fn(f64) -> V3| {
        let mut v: Vec<V3> = (0..samples).map(|i| r * f(i as f64 / samples as f64) + shift).collect();
        v.push(v[0]);
        ParametricCurve::from_samples(&v).expect("closed by construction")
    };
    (sample(&core), sample(&torus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn hopf_pair_links_once() {
        let (a, b) = hopf_pair();
        let l = gauss_linking(&a, &b, DEFAULT_NODES).unwrap();
        assert!((l.estimate - 1.0).abs() < 1e-6, "{l:?}");
        assert_eq!(l.integer, 1);
        let mut r = rng::master(41);
        assert_eq!(crossing_count_linking(&a, &b, 400, &mut r).unwrap(), 1);
    }

    #[test]
    fn hopf_fibers_are_closed_with_consistent_velocity() {
        let (_, b) = hopf_pair();
        for i in 0..20 {
            let t = i as f64 / 20.0;
            let h = 1e-6;
            let fd = (b.eval(t + h).0 - b.eval(t - h).0) / (2.0 * h);
            assert!((fd - b.eval(t).1).norm() < 1e-6);
        }
    }

    #[test]
    fn split_pair_and_doubling() {
        let (a, b) = split_pair();
        let l = gauss_linking(&a, &b, DEFAULT_NODES).unwrap();
        assert!(l.estimate.abs() < 1e-6);
        let (a, b) = hopf_pair();
        let d = gauss_linking(&a, &b.repeated(2), DEFAULT_NODES).unwrap();
        assert!((d.estimate - 2.0).abs() < 1e-4, "{d:?}");
    }

    #[test]
    fn symmetric_and_rigid_invariant() {
        let mut r = rng::master(42);
        let (a, b) = hopf_pair();
        let ab = gauss_linking(&a, &b, DEFAULT_NODES).unwrap().estimate;
        let ba = gauss_linking(&b, &a, DEFAULT_NODES).unwrap().estimate;
        assert!((ab - ba).abs() < 1e-9);
        let rot = random_rotation(&mut r);
        let shift = V3::new(1.0, -2.0, 0.5);
        let moved = gauss_linking(&a.transformed(&rot, &shift), &b.transformed(&rot, &shift), DEFAULT_NODES)
            .unwrap()
            .estimate;
        assert!((moved - ab).abs() < 1e-3);
        // A reflection reverses the sign.
        let m = Matrix3::from_diagonal(&V3::new(1.0, 1.0, -1.0));
        let z = V3::zeros();
        let mirrored = gauss_linking(&a.transformed(&m, &z), &b.transformed(&m, &z), DEFAULT_NODES)
            .unwrap()
            .estimate;
        assert!((mirrored + ab).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        let v = vec![V3::zeros(), V3::x(), V3::y(), V3::z()];
        assert!(matches!(ParametricCurve::from_samples(&v), Err(Error::NotClosed(_))));
        assert!(matches!(
            ParametricCurve::closed(|t| (V3::new(t, 0.0, 0.0), V3::x())),
            Err(Error::NotClosed(_))
        ));
        // Two great circles of the unit sphere meet at (0, ±1, 0).
        let e =ParametricCurve::Circle { center: V3::zeros(), normal: V3::z(), radius: 1.0 };
        let f = ParametricCurve::Circle { center: V3::zeros(), normal: V3::x(), radius: 1.0 };
        assert!(matches!(gauss_linking(&e, &f, 64), Err(Error::CurvesTooClose(_))));
    }

    #[test]
    fn json_forms() {
        let j: CurveJson =
            serde_json::from_str(r#"{"kind":"circle","center":[0,0,0],"normal":[0,0,2],"radius":1}"#).unwrap();
        assert!(matches!(ParametricCurve::from_json(&j).unwrap(), ParametricCurve::Circle { .. }));
        let j: CurveJson = serde_json::from_str(r#"{"samples":[[0,0,0],[1,0,0],[0,1,0],[0,0,0]]}"#).unwrap();
        assert!(matches!(ParametricCurve::from_json(&j).unwrap(), ParametricCurve::Polygon(v) if v.len() == 3));
    }

    #[test]
    fn random_links_match_the_crossing_oracle() {
        let mut r = rng::master(43);
        for _ in 0..5 {
            let (a, b) = random_sampled_link(&mut r, 120);
            let l = gauss_linking(&a, &b, DEFAULT_NODES).unwrap();
            let oracle = crossing_count_linking(&a, &b, 0, &mut r).unwrap();
            assert_eq!(l.integer, oracle, "{l:?}");
            assert!(l.confidence > 0.4);
        }
    }
}
