//! Chart `ξ` and retraction `r` near a collapse at a point of `M ∖ ∞`.
//!
//! `φ` is the identity chart of `ℝ³`, so a configuration is a map
//! `V → ℝ³` and the chart of a member `A` is `ψ(A;φ;b(A))`:
//! `(u, λ, y) ↦ (a ↦ u + λ y(a))` with `y(b(A)) = 0` and `‖y‖ = 1`.

use super::field::{self, Field, V3};
use super::tree::{Child, Tree, Variant};
use super::{MIN_NORM, MIN_SEPARATION};
use crate::error::{Error, Result};

/// `P = ((μ_A), u, (w_A))`, indexed like `tree.nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChartPoint {
    pub mu: Vec<f64>,
    pub u: V3,
    pub w: Vec<Field>,
}

/// Coordinates of `c_A` in `ψ(A;φ;b(A))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChart {
    pub u: V3,
    pub lambda: f64,
    pub y: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteConfigPoint {
    pub charts: Vec<FiniteChart>,
}

impl FiniteChartPoint {
    /// Largest componentwise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d = (self.u - other.u).norm();
        for (a, b) in self.mu.iter().zip(&other.mu) {
            d = d.max((a - b).abs());
        }
        for (a, b) in self.w.iter().zip(&other.w) {
            d = d.max(field::distance(a, b));
        }
        d
    }
}

impl FiniteConfigPoint {
    pub fn distance(&self, other: &Self) -> f64 {
        self.charts
            .iter()
            .zip(&other.charts)
            .map(|(a, b)| {
                (a.u - b.u)
                    .norm()
                    .max((a.lambda - b.lambda).abs())
                    .max(field::distance(&a.y, &b.y))
            })
            .fold(0.0, f64::max)
    }
}

const TOL: f64 = 1e-9;

fn shape_error(what: impl Into<String>) -> Error {
    Error::MalformedInput(what.into())
}

fn require_finite(tree: &Tree) -> Result<()> {
    if tree.variant != Variant::Finite {
        return Err(Error::NotApplicable("tree is not of the finite variant".into()));
    }
    Ok(())
}

/// Checks that `w_A` is a unit vector supported on `A ∖ b(A)`, vanishing on
/// the child of `b(A)` and constant on daughters.
fn check_direction(tree: &Tree, node: usize, w: &[V3]) -> Result<()> {
    let nd = &tree.nodes[node];
    let n = tree.n_points();
    if w.len() != n {
        return Err(shape_error(format!("direction of member {node} has length {}", w.len())));
    }
    if (field::norm(w) - 1.0).abs() > TOL {
        return Err(shape_error(format!("direction of member {node} is not a unit vector")));
    }
    for p in 0..n {
        let outside = !nd.contains(p);
        let base_child = nd.contains(p) && tree.child_of(node, p) == tree.child_of(node, nd.b);
        if (outside || base_child) && w[p].norm() > TOL {
            return Err(shape_error(format!(
                "direction of member {node} does not vanish at point {}",
                tree.labels[p]
            )));
        }
    }
    for &d in &nd.daughters {
        let x = w[tree.nodes[d].b];
        if tree.nodes[d].set.iter().any(|&p| (w[p] - x).norm() > TOL) {
            return Err(shape_error(format!(
                "direction of member {node} is not constant on a daughter"
            )));
        }
    }
    Ok(())
}

/// Minimum distance between values of a unit field at points of different
/// children of `node`.
pub(crate) fn child_separation(tree: &Tree, node: usize, y: &[V3]) -> f64 {
    let set = &tree.nodes[node].set;
    let mut m = f64::INFINITY;
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i + 1..] {
            if tree.child_of(node, a) != tree.child_of(node, b) {
                m = m.min((y[a] - y[b]).norm());
            }
        }
    }
    m
}

/// `v_A = Σ_{C ⊆ A} (Π_{C ⊆ D ⊊ A} μ_D) w_C`, computed as
/// `v_A = w_A + Σ_{C daughter of A} μ_C v_C`.
pub fn v_vectors(tree: &Tree, p: &FiniteChartPoint) -> Result<Vec<Field>> {
    require_finite(tree)?;
    let k = tree.nodes.len();
    if p.mu.len() != k || p.w.len() != k {
        return Err(shape_error("chart point does not match the tree"));
    }
    for (i, w) in p.w.iter().enumerate() {
        check_direction(tree, i, w)?;
    }
    let mut v: Vec<Field> = p.w.clone();
    for a in (0..k).rev() {
        for &c in &tree.nodes[a].daughters {
            let vc = v[c].clone();
            field::axpy(&mut v[a], p.mu[c], &vc);
        }
        if field::norm(&v[a]) == 0.0 {
            return Err(Error::DegenerateScale(format!("v vanishes on member {a}")));
        }
    }
    Ok(v)
}

/// `v` vectors after checking the admissibility fences.
pub fn admissible_v(tree: &Tree, p: &FiniteChartPoint) -> Result<Vec<Field>> {
    let v = v_vectors(tree, p)?;
    if let Some(m) = p.mu.iter().find(|m| !(**m >= 0.0)) {
        return Err(Error::OutsideNeighborhood(format!("negative scale {m}")));
    }
    for (a, va) in v.iter().enumerate() {
        let nv = field::norm(va);
        if nv < MIN_NORM {
            return Err(Error::OutsideNeighborhood(format!("‖v‖ = {nv} on member {a}")));
        }
        let sep = child_separation(tree, a, &field::scaled(va, 1.0 / nv));
        if sep < MIN_SEPARATION {
            return Err(Error::OutsideNeighborhood(format!(
                "children of member {a} separated by {sep}"
            )));
        }
    }
    Ok(v)
}

/// `Π_{A ⊆ D ⊆ V} μ_D`.
fn scale_to_root(tree: &Tree, mu: &[f64], node: usize) -> f64 {
    let mut prod = 1.0;
    let mut cur = Some(node);
    while let Some(c) = cur {
        prod *= mu[c];
        cur = tree.nodes[c].parent;
    }
    prod
}

/// `ξ(P)`: per member, `u + (μ_V/‖v_V‖) v_V(b(A))`,
/// `‖v_A‖ Π_{A ⊆ D ⊆ V} μ_D / ‖v_V‖` and `v_A/‖v_A‖`.
pub fn chart_xi(tree: &Tree, p: &FiniteChartPoint) -> Result<FiniteConfigPoint> {
    let v = admissible_v(tree, p)?;
    let nvv = field::norm(&v[0]);
    let charts = (0..tree.nodes.len())
        .map(|a| {
            let nva = field::norm(&v[a]);
            FiniteChart {
                u: p.u + p.mu[0] / nvv * v[0][tree.nodes[a].b],
                lambda: nva * scale_to_root(tree, &p.mu, a) / nvv,
                y: field::scaled(&v[a], 1.0 / nva),
            }
        })
        .collect();
    Ok(FiniteConfigPoint { charts })
}

fn check_config(tree: &Tree, q: &FiniteConfigPoint) -> Result<()> {
    require_finite(tree)?;
    if q.charts.len() != tree.nodes.len() {
        return Err(shape_error("configuration point does not match the tree"));
    }
    if q.charts.iter().any(|c| c.y.len() != tree.n_points()) {
        return Err(shape_error("chart direction has the wrong length"));
    }
    Ok(())
}

/// `w¹_A`: `y_A` on sons, `y_A(b(B))` on a daughter `B`.
pub(crate) fn collapse_daughters(tree: &Tree, node: usize, y: &[V3]) -> Field {
    let mut w1 = field::zeros(tree.n_points());
    for &p in &tree.nodes[node].set {
        w1[p] = match tree.child_of(node, p) {
            Child::Son(p) => y[p],
            Child::Daughter(d) => y[tree.nodes[d].b],
        };
    }
    w1
}

pub(crate) fn normalized(f: Field, what: impl FnOnce() -> String) -> Result<Field> {
    let n = field::norm(&f);
    if n < 1e-12 {
        return Err(Error::DegenerateDirection(what()));
    }
    Ok(field::scaled(&f, 1.0 / n))
}

pub(crate) fn nonzero(x: V3, what: impl FnOnce() -> String) -> Result<f64> {
    let n = x.norm();
    if n < 1e-12 {
        return Err(Error::DegenerateDirection(what()));
    }
    Ok(n)
}

/// `r(Q)`: `w_A = w¹_A/‖w¹_A‖`, `u = u_V`, `μ_V = λ_V` and
/// `μ_A = ‖w_Â(b′(Â))‖ ⟨y_Â(b′(A)) − y_Â(b(A)), w_A(b′(A))⟩ / (‖y_Â(b′(Â))‖ ‖w_A(b′(A))‖²)`.
pub fn retraction_r(tree: &Tree, q: &FiniteConfigPoint) -> Result<FiniteChartPoint> {
    check_config(tree, q)?;
    let k = tree.nodes.len();
    let mut w = Vec::with_capacity(k);
    for a in 0..k {
        let w1 = collapse_daughters(tree, a, &q.charts[a].y);
        w.push(normalized(w1, || format!("w¹ vanishes on member {a}"))?);
    }
    let mut mu = vec![0.0; k];
    mu[0] = q.charts[0].lambda;
    for a in 1..k {
        let nd = &tree.nodes[a];
        let m = nd.parent.expect("only V has no mother");
        let bp = nd.bprime.expect("members have two points");
        let bpm = tree.nodes[m].bprime.expect("members have two points");
        let ym = &q.charts[m].y;
        let wa = w[a][bp];
        let den = nonzero(wa, || format!("w vanishes at the witness point of member {a}"))?;
        let ratio = w[m][bpm].norm()
            / nonzero(ym[bpm], || format!("y vanishes at the witness point of member {m}"))?;
        mu[a] = (ym[bp] - ym[nd.b]).dot(&wa) / (den * den) * ratio;
    }
    Ok(FiniteChartPoint {
        mu,
        u: q.charts[0].u,
        w,
    })
}

/// The configuration `a ↦ u_V + λ_V y_V(a)`.
pub fn realized_points(q: &FiniteConfigPoint) -> Field {
    let c = &q.charts[0];
    c.y.iter().map(|y| c.u + c.lambda * y).collect()
}

/// Residuals of the restriction conditions over all nested pairs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConditionResiduals {
    /// Largest mismatch between the positions given by two nested charts.
    pub c1: f64,
    /// Largest distance of a restricted direction from the line of the
    /// smaller member's direction.
    pub c2: f64,
    /// Smallest multiple found in the colinearity check; must be `≥ 0`.
    pub min_multiple: f64,
}

pub fn check_conditions(tree: &Tree, q: &FiniteConfigPoint) -> Result<ConditionResiduals> {
    check_config(tree, q)?;
    let mut out = ConditionResiduals {
        c1: 0.0,
        c2: 0.0,
        min_multiple: f64::INFINITY,
    };
    for (a, na) in tree.nodes.iter().enumerate() {
        let mut anc = na.parent;
        while let Some(b) = anc {
            let (ca, cb) = (&q.charts[a], &q.charts[b]);
            for &p in &na.set {
                let pa = ca.u + ca.lambda * ca.y[p];
                let pb = cb.u + cb.lambda * cb.y[p];
                out.c1 = out.c1.max((pa - pb).norm());
            }
            let x: Field = na.set.iter().map(|&p| cb.y[p] - cb.y[na.b]).collect();
            let (r, t) = field::colinearity(&x, &field::restrict(&ca.y, &na.set));
            out.c2 = out.c2.max(r);
            out.min_multiple = out.min_multiple.min(t);
            anc = tree.nodes[b].parent;
        }
    }
    Ok(out)
}
