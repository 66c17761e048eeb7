//! Chart `ξ` and retraction `r` near a configuration where every point goes
//! to `∞`.
//!
//! `φ_∞` is the inversion chart, so a configuration near `∞^V` is written as
//! a map `V → ℝ³` in which `0` stands for `∞`. Members off `τ_d` use the
//! chart `ψ(A;φ_∞)`, `(ℓ, S) ↦ ℓ S`; degenerate members use
//! `ψ(A;φ_∞;b(A))`, `(ℓ, u, m, v) ↦ ℓ (u/√♯A + m v)` with `v(b(A)) = 0`.

use std::collections::BTreeMap;

use super::field::{self, Field, V3};
use super::finite::{child_separation, collapse_daughters, nonzero, normalized};
use super::tree::{Child, Tree, Variant};
use super::{MIN_NORM, MIN_SEPARATION};
use crate::error::{Error, Result};

/// `P = ((ν_i), (μ_A)_{A∈τ_d}, (s_i), (w_A)_{A∈τ_d})`. `nu[i]` and `s[i]`
/// belong to `V(i+1)`; `mu` and `w` are keyed by node index.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinityChartPoint {
    pub nu: Vec<f64>,
    pub s: Vec<Field>,
    pub mu: BTreeMap<usize, f64>,
    pub w: BTreeMap<usize, Field>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InfinityChart {
    /// `ψ(A;φ_∞)(ℓ, S)`.
    Plain { ell: f64, s: Field },
    /// `ψ(A;φ_∞;b(A))(ℓ, u, m, v)`.
    Based { ell: f64, u: V3, m: f64, v: Field },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfinityConfigPoint {
    pub charts: Vec<InfinityChart>,
}

impl InfinityChartPoint {
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (a, b) in self.nu.iter().zip(&other.nu) {
            d = d.max((a - b).abs());
        }
        for (a, b) in self.s.iter().zip(&other.s) {
            d = d.max(field::distance(a, b));
        }
        for (k, a) in &self.mu {
            d = d.max(other.mu.get(k).map_or(f64::INFINITY, |b| (a - b).abs()));
        }
        for (k, a) in &self.w {
            d = d.max(other.w.get(k).map_or(f64::INFINITY, |b| field::distance(a, b)));
        }
        d
    }
}

impl InfinityChart {
    /// Position map in the chart at infinity, supported on the member.
    pub fn realized(&self, set: &[usize], n: usize) -> Field {
        let mut out = field::zeros(n);
        match self {
            InfinityChart::Plain { ell, s } => {
                for &p in set {
                    out[p] = *ell * s[p];
                }
            }
            InfinityChart::Based { ell, u, m, v } => {
                let c = u / (set.len() as f64).sqrt();
                for &p in set {
                    out[p] = *ell * (c + *m * v[p]);
                }
            }
        }
        out
    }

    /// Unit direction of the configuration on the member.
    fn direction(&self, set: &[usize], n: usize) -> Field {
        let mut out = field::zeros(n);
        match self {
            InfinityChart::Plain { s, .. } => {
                for &p in set {
                    out[p] = s[p];
                }
            }
            InfinityChart::Based { u, m, v, .. } => {
                let c = u / (set.len() as f64).sqrt();
                for &p in set {
                    out[p] = c + *m * v[p];
                }
                let nn = field::norm(&out);
                out = field::scaled(&out, 1.0 / nn);
            }
        }
        out
    }

    fn distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (InfinityChart::Plain { ell: a, s: x }, InfinityChart::Plain { ell: b, s: y }) => {
                (a - b).abs().max(field::distance(x, y))
            }
            (
                InfinityChart::Based { ell: a, u: u1, m: m1, v: v1 },
                InfinityChart::Based { ell: b, u: u2, m: m2, v: v2 },
            ) => (a - b)
                .abs()
                .max((u1 - u2).norm())
                .max((m1 - m2).abs())
                .max(field::distance(v1, v2)),
            _ => f64::INFINITY,
        }
    }
}

impl InfinityConfigPoint {
    pub fn distance(&self, other: &Self) -> f64 {
        self.charts
            .iter()
            .zip(&other.charts)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

const TOL: f64 = 1e-9;

fn shape_error(what: impl Into<String>) -> Error {
    Error::MalformedInput(what.into())
}

fn require_infinity(tree: &Tree) -> Result<()> {
    if tree.variant != Variant::Infinity {
        return Err(Error::NotApplicable("tree is not of the infinity variant".into()));
    }
    Ok(())
}

fn check_unit(f: &[V3], n: usize, what: &str) -> Result<()> {
    if f.len() != n {
        return Err(shape_error(format!("{what} has length {}", f.len())));
    }
    if (field::norm(f) - 1.0).abs() > TOL {
        return Err(shape_error(format!("{what} is not a unit vector")));
    }
    Ok(())
}

fn check_point(tree: &Tree, p: &InfinityChartPoint) -> Result<()> {
    require_infinity(tree)?;
    let n = tree.n_points();
    let sigma = tree.sigma();
    let deg = tree.degenerate_nodes();
    if p.nu.len() != sigma || p.s.len() != sigma {
        return Err(shape_error("chain data does not match the tree"));
    }
    if p.mu.keys().copied().collect::<Vec<_>>() != deg || p.w.keys().copied().collect::<Vec<_>>() != deg {
        return Err(shape_error("degenerate data does not match the tree"));
    }
    for (i, &c) in tree.chain.iter().enumerate() {
        let s = &p.s[i];
        check_unit(s, n, &format!("s_{}", i + 1))?;
        let nd = &tree.nodes[c];
        for q in 0..n {
            let in_next = tree.chain.get(i + 1).is_some_and(|&d| tree.nodes[d].contains(q));
            if (!nd.contains(q) || in_next) && s[q].norm() > TOL {
                return Err(shape_error(format!("s_{} does not vanish at point {}", i + 1, tree.labels[q])));
            }
        }
        let blocks: Vec<Vec<usize>> = if nd.degenerate {
            vec![nd.set.clone()]
        } else {
            nd.daughters.iter().map(|&d| tree.nodes[d].set.clone()).collect()
        };
        for blk in blocks {
            let x = s[blk[0]];
            if blk.iter().any(|&q| (s[q] - x).norm() > TOL) {
                return Err(shape_error(format!("s_{} is not constant where required", i + 1)));
            }
        }
    }
    for &a in &deg {
        let w = &p.w[&a];
        check_unit(w, n, &format!("w of member {a}"))?;
        let nd = &tree.nodes[a];
        for q in 0..n {
            let base = nd.contains(q) && tree.child_of(a, q) == tree.child_of(a, nd.b);
            if (!nd.contains(q) || base) && w[q].norm() > TOL {
                return Err(shape_error(format!("w of member {a} does not vanish at point {}", tree.labels[q])));
            }
        }
        for &d in &nd.daughters {
            let x = w[tree.nodes[d].b];
            if tree.nodes[d].set.iter().any(|&q| (w[q] - x).norm() > TOL) {
                return Err(shape_error(format!("w of member {a} is not constant on a daughter")));
            }
        }
    }
    Ok(())
}

/// `w̃_A = w_A + Σ_{C ∈ D(A)} μ_C w̃_C` for degenerate `A`.
pub fn w_tilde(tree: &Tree, mu: &BTreeMap<usize, f64>, w: &BTreeMap<usize, Field>) -> BTreeMap<usize, Field> {
    let mut out: BTreeMap<usize, Field> = BTreeMap::new();
    for (&a, wa) in w.iter().rev() {
        let mut x = wa.clone();
        for &c in &tree.nodes[a].daughters {
            field::axpy(&mut x, mu[&c], &out[&c]);
        }
        out.insert(a, x);
    }
    out
}

/// `s̃_σ` and then `s̃_i = s_i + ν_{i+1} s̃_{i+1} + Σ_{C ∈ D(V(i)), C ≠ V(i+1)} μ_C w̃_C`.
pub fn s_tilde(tree: &Tree, p: &InfinityChartPoint, wt: &BTreeMap<usize, Field>) -> Vec<Field> {
    let sigma = tree.sigma();
    let mut out = vec![Vec::new(); sigma];
    for i in (0..sigma).rev() {
        let c = tree.chain[i];
        let mut x = p.s[i].clone();
        if i + 1 == sigma && tree.nodes[c].degenerate {
            field::axpy(&mut x, p.mu[&c], &wt[&c]);
        } else {
            if i + 1 < sigma {
                field::axpy(&mut x, p.nu[i + 1], &out[i + 1]);
            }
            for &d in &tree.nodes[c].daughters {
                if tree.chain.get(i + 1) != Some(&d) {
                    field::axpy(&mut x, p.mu[&d], &wt[&d]);
                }
            }
        }
        out[i] = x;
    }
    out
}

/// `λ_r = Π_{i ≤ r} ν_i` for `r = 1..σ`.
pub fn lambdas(nu: &[f64]) -> Vec<f64> {
    nu.iter()
        .scan(1.0, |acc, v| {
            *acc *= v;
            Some(*acc)
        })
        .collect()
}

/// Minimum norm over the points of `V(i) ∖ V(i)_0`.
fn min_value_off_special(tree: &Tree, i: usize, y: &[V3]) -> f64 {
    let nd = &tree.nodes[tree.chain[i]];
    let next = tree.chain.get(i + 1).map(|&d| &tree.nodes[d]);
    nd.set
        .iter()
        .filter(|&&q| !next.is_some_and(|d| d.contains(q)))
        .map(|&q| y[q].norm())
        .fold(f64::INFINITY, f64::min)
}

/// `(w̃, s̃)` after checking the admissibility fences.
pub fn admissible_tildes(tree: &Tree, p: &InfinityChartPoint) -> Result<(BTreeMap<usize, Field>, Vec<Field>)> {
    check_point(tree, p)?;
    if let Some(x) = p.nu.iter().chain(p.mu.values()).find(|m| !(**m >= 0.0)) {
        return Err(Error::OutsideNeighborhood(format!("negative scale {x}")));
    }
    let wt = w_tilde(tree, &p.mu, &p.w);
    for (&a, x) in &wt {
        let nx = field::norm(x);
        if nx < MIN_NORM {
            return Err(Error::OutsideNeighborhood(format!("‖w̃‖ = {nx} on member {a}")));
        }
        let sep = child_separation(tree, a, &field::scaled(x, 1.0 / nx));
        if sep < MIN_SEPARATION {
            return Err(Error::OutsideNeighborhood(format!("children of member {a} separated by {sep}")));
        }
    }
    let st = s_tilde(tree, p, &wt);
    for (i, x) in st.iter().enumerate() {
        let nx = field::norm(x);
        if nx < MIN_NORM {
            return Err(Error::OutsideNeighborhood(format!("‖s̃_{}‖ = {nx}", i + 1)));
        }
        let y = field::scaled(x, 1.0 / nx);
        let c = tree.chain[i];
        if !tree.nodes[c].degenerate {
            let sep = child_separation(tree, c, &y);
            if sep < MIN_SEPARATION {
                return Err(Error::OutsideNeighborhood(format!("children of V({}) separated by {sep}", i + 1)));
            }
        }
        let m = min_value_off_special(tree, i, &y);
        if m < MIN_SEPARATION {
            return Err(Error::OutsideNeighborhood(format!("s̃_{} comes within {m} of 0", i + 1)));
        }
    }
    Ok((wt, st))
}

/// `Π_{D ∈ τ_d, A ⊆ D ⊆ V(i(A))} μ_D`.
fn degenerate_scale(tree: &Tree, mu: &BTreeMap<usize, f64>, node: usize) -> f64 {
    let mut prod = 1.0;
    let mut cur = Some(node);
    while let Some(c) = cur {
        if !tree.nodes[c].degenerate {
            break;
        }
        prod *= mu[&c];
        if tree.nodes[c].special {
            break;
        }
        cur = tree.nodes[c].parent;
    }
    prod
}

/// `ξ(P)` in the charts `ψ(A;φ_∞)` and `ψ(A;φ_∞;b(A))`.
pub fn chart_xi_infty(tree: &Tree, p: &InfinityChartPoint) -> Result<InfinityConfigPoint> {
    let (wt, st) = admissible_tildes(tree, p)?;
    let lam = lambdas(&p.nu);
    let mut charts = Vec::with_capacity(tree.nodes.len());
    for (a, nd) in tree.nodes.iter().enumerate() {
        let i = tree.level(a);
        if !nd.degenerate {
            let ns = field::norm(&st[i]);
            charts.push(InfinityChart::Plain {
                ell: lam[i] * ns,
                s: field::scaled(&st[i], 1.0 / ns),
            });
        } else {
            let sb = st[i][nd.b];
            let nsb = sb.norm();
            if nsb == 0.0 {
                return Err(Error::DegenerateScale(format!("s̃ vanishes at the basepoint of member {a}")));
            }
            let root = (nd.set.len() as f64).sqrt();
            let nw = field::norm(&wt[&a]);
            charts.push(InfinityChart::Based {
                ell: lam[i] * root * nsb,
                u: sb / nsb,
                m: degenerate_scale(tree, &p.mu, a) * nw / (root * nsb),
                v: field::scaled(&wt[&a], 1.0 / nw),
            });
        }
    }
    Ok(InfinityConfigPoint { charts })
}

fn check_config(tree: &Tree, q: &InfinityConfigPoint) -> Result<()> {
    require_infinity(tree)?;
    if q.charts.len() != tree.nodes.len() {
        return Err(shape_error("configuration point does not match the tree"));
    }
    for (a, c) in q.charts.iter().enumerate() {
        let ok = match c {
            InfinityChart::Plain { s, .. } => !tree.nodes[a].degenerate && s.len() == tree.n_points(),
            InfinityChart::Based { v, .. } => tree.nodes[a].degenerate && v.len() == tree.n_points(),
        };
        if !ok {
            return Err(shape_error(format!("chart of member {a} has the wrong kind or length")));
        }
    }
    Ok(())
}

fn plain(q: &InfinityConfigPoint, a: usize) -> (f64, &Field) {
    match &q.charts[a] {
        InfinityChart::Plain { ell, s } => (*ell, s),
        InfinityChart::Based { .. } => unreachable!("checked by check_config"),
    }
}

fn based(q: &InfinityConfigPoint, a: usize) -> (f64, V3, f64, &Field) {
    match &q.charts[a] {
        InfinityChart::Based { ell, u, m, v } => (*ell, *u, *m, v),
        InfinityChart::Plain { .. } => unreachable!("checked by check_config"),
    }
}

/// Which case of the `ν_i` formula was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum NuBranch {
    /// `ν_1 = ℓ_V` (`V` degenerate or a single point).
    RootScale,
    /// `ν_1` from `S_V` at `b′_1`.
    RootWitness,
    /// `ν_σ` read at `b_σ` (`V(σ)` degenerate or a single point).
    LastAtBasepoint,
    /// `ν_i` read at `b′_i`.
    AtWitness,
}

/// `r(Q)` together with the `ν` case used at each level.
pub fn retraction_r_infty_traced(tree: &Tree, q: &InfinityConfigPoint) -> Result<(InfinityChartPoint, Vec<NuBranch>)> {
    check_config(tree, q)?;
    let n = tree.n_points();
    let sigma = tree.sigma();
    let deg = tree.degenerate_nodes();

    // w_A from the collapse of daughters in v_A.
    let mut w = BTreeMap::new();
    for &a in &deg {
        let (_, _, _, v) = based(q, a);
        let w1 = collapse_daughters(tree, a, v);
        w.insert(a, normalized(w1, || format!("w¹ vanishes on member {a}"))?);
    }

    // s_i: zero on V(i)_0, S on sons, S(b(B)) on the other daughters.
    let mut s = Vec::with_capacity(sigma);
    for (i, &c) in tree.chain.iter().enumerate() {
        let nd = &tree.nodes[c];
        if nd.degenerate {
            let (_, u, _, _) = based(q, c);
            let mut x = field::zeros(n);
            let k = (nd.set.len() as f64).sqrt();
            for &p in &nd.set {
                x[p] = u / k;
            }
            s.push(x);
        } else {
            let (_, big_s) = plain(q, c);
            let mut s1 = field::zeros(n);
            for &p in &nd.set {
                s1[p] = match tree.child_of(c, p) {
                    Child::Son(p) => big_s[p],
                    Child::Daughter(d) if tree.chain.get(i + 1) == Some(&d) => V3::zeros(),
                    Child::Daughter(d) => big_s[tree.nodes[d].b],
                };
            }
            s.push(normalized(s1, || format!("s¹ vanishes on V({})", i + 1))?);
        }
    }

    // μ_A for the non-special degenerate members, from the mother's chart.
    let mut mu = BTreeMap::new();
    for &a in &deg {
        let nd = &tree.nodes[a];
        if nd.special {
            continue;
        }
        let m = nd.parent.expect("V is special");
        let bp = nd.bprime.expect("degenerate members have two points");
        let bpm = tree.nodes[m].bprime.expect("mothers have two points");
        let (big, small): (&Field, &Field) = if tree.nodes[m].degenerate {
            (based(q, m).3, &w[&m])
        } else {
            (plain(q, m).1, &s[tree.level(m)])
        };
        let wa = w[&a][bp];
        let den = nonzero(wa, || format!("w vanishes at the witness point of member {a}"))?;
        let ratio = small[bpm].norm()
            / nonzero(big[bpm], || format!("direction vanishes at the witness point of member {m}"))?;
        mu.insert(a, (big[bp] - big[nd.b]).dot(&wa) / (den * den) * ratio);
    }
    let last = *tree.chain.last().expect("V is special");
    if tree.nodes[last].degenerate {
        // μ_{V(σ)} = m / ‖w̃_{V(σ)}‖ with w̃ built from the recovered data.
        let wt = w_tilde(tree, &mu, &w);
        let (_, _, m, _) = based(q, last);
        let nw = field::norm(&wt[&last]);
        if nw < 1e-12 {
            return Err(Error::DegenerateDirection("w̃ vanishes on V(σ)".into()));
        }
        mu.insert(last, m / nw);
    }

    // ν_i.
    let mut nu = Vec::with_capacity(sigma);
    let mut branches = Vec::with_capacity(sigma);
    let root = &tree.nodes[0];
    if root.degenerate || root.set.len() == 1 {
        let ell = match &q.charts[0] {
            InfinityChart::Plain { ell, .. } | InfinityChart::Based { ell, .. } => *ell,
        };
        nu.push(ell);
        branches.push(NuBranch::RootScale);
    } else {
        let (ell, big_s) = plain(q, 0);
        let bp = root.bprime.expect("V has two points");
        let sp = s[0][bp];
        let d = nonzero(sp, || "s_1 vanishes at b′_1".to_string())?;
        nu.push(ell * big_s[bp].dot(&sp) / (d * d));
        branches.push(NuBranch::RootWitness);
    }
    for i in 1..sigma {
        let c = tree.chain[i];
        let nd = &tree.nodes[c];
        let (p, branch) = if i + 1 == sigma && (nd.degenerate || nd.set.len() == 1) {
            (nd.b, NuBranch::LastAtBasepoint)
        } else {
            (nd.bprime.expect("V(i) has two points"), NuBranch::AtWitness)
        };
        let prev = tree.chain[i - 1];
        let (_, big_prev) = plain(q, prev);
        let bpp = tree.nodes[prev].bprime.expect("V(i-1) has two points");
        let sp = s[i][p];
        let d = nonzero(sp, || format!("s_{} vanishes at its reading point", i + 1))?;
        let ratio = s[i - 1][bpp].norm()
            / nonzero(big_prev[bpp], || format!("S vanishes at the witness point of V({i})"))?;
        nu.push(big_prev[p].dot(&sp) / (d * d) * ratio);
        branches.push(branch);
    }
    Ok((InfinityChartPoint { nu, s, mu, w }, branches))
}

pub fn retraction_r_infty(tree: &Tree, q: &InfinityConfigPoint) -> Result<InfinityChartPoint> {
    retraction_r_infty_traced(tree, q).map(|(p, _)| p)
}

/// The configuration `a ↦ λ_1 s̃_1(a)` in the chart at infinity, read off
/// the chart of `V`.
pub fn realized_points_infty(tree: &Tree, q: &InfinityConfigPoint) -> Field {
    q.charts[0].realized(&tree.nodes[0].set, tree.n_points())
}

/// Residuals of the restriction conditions over all nested pairs: positions
/// (`c1`), colinearity of directions at infinity and, between degenerate
/// members, of the directions up to translation (`c2`).
pub fn check_conditions_infty(tree: &Tree, q: &InfinityConfigPoint) -> Result<super::finite::ConditionResiduals> {
    check_config(tree, q)?;
    let n = tree.n_points();
    let mut out = super::finite::ConditionResiduals {
        c1: 0.0,
        c2: 0.0,
        min_multiple: f64::INFINITY,
    };
    for (a, na) in tree.nodes.iter().enumerate() {
        let ra = q.charts[a].realized(&na.set, n);
        let da = field::restrict(&q.charts[a].direction(&na.set, n), &na.set);
        let mut anc = na.parent;
        while let Some(b) = anc {
            let nb = &tree.nodes[b];
            let rb = q.charts[b].realized(&nb.set, n);
            for &p in &na.set {
                out.c1 = out.c1.max((ra[p] - rb[p]).norm());
            }
            let db = q.charts[b].direction(&nb.set, n);
            let (r, t) = field::colinearity(&field::restrict(&db, &na.set), &da);
            out.c2 = out.c2.max(r);
            out.min_multiple = out.min_multiple.min(t);
            if na.degenerate && nb.degenerate {
                let (_, _, _, va) = based(q, a);
                let (_, _, _, vb) = based(q, b);
                let x: Field = na.set.iter().map(|&p| vb[p] - vb[na.b]).collect();
                let (r, t) = field::colinearity(&x, &field::restrict(va, &na.set));
                out.c2 = out.c2.max(r);
                out.min_multiple = out.min_multiple.min(t);
            }
            anc = nb.parent;
        }
    }
    Ok(out)
}
