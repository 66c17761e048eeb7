//! Random trees and admissible chart points.
//!
//! Tree shapes are enumerated exhaustively for each size and one is drawn
//! uniformly; basepoints are then drawn uniformly subject to coherence.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::field::{self, Field, V3};
use super::finite::{admissible_v, FiniteChartPoint};
use super::infinity::{admissible_tildes, InfinityChartPoint};
use super::tree::{MemberJson, NestedTree, Tree, Variant};

pub const MAX_POINTS_FINITE: usize = 5;
pub const MAX_POINTS_INFINITY: usize = 4;
pub const MAX_DEPTH: usize = 3;
pub const MAX_SIGMA: usize = 2;

/// A member without basepoints: `(set, degenerate, special)`.
type Shape = Vec<(Vec<usize>, bool, bool)>;

/// Set partitions of `items`.
fn partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

/// Product of per-block alternatives.
fn product(options: Vec<Vec<Shape>>) -> Vec<Shape> {
    options.into_iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|a| {
                opts.iter().map(move |o| {
                    let mut x = a.clone();
                    x.extend(o.iter().cloned());
                    x
                })
            })
            .collect()
    })
}

/// Hierarchies strictly below `set`, `levels` levels deep at most including
/// `set`; every member gets the flag `degenerate`.
fn below(set: &[usize], levels: usize, degenerate: bool) -> Vec<Shape> {
    if levels <= 1 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in partitions(set) {
        if p.len() < 2 {
            continue;
        }
        let opts = p
            .iter()
            .filter(|b| b.len() >= 2)
            .map(|b| {
                below(b, levels - 1, degenerate)
                    .into_iter()
                    .map(|mut s| {
                        s.insert(0, (b.clone(), degenerate, false));
                        s
                    })
                    .collect()
            })
            .collect();
        out.extend(product(opts));
    }
    out
}

/// Shapes of a special member `set` with everything below it.
fn special(set: &[usize], levels: usize, sigma_left: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    if set.len() == 1 {
        return vec![vec![(set.to_vec(), false, true)]];
    }
    // Degenerate last special member.
    for s in below(set, levels, true) {
        let mut x = vec![(set.to_vec(), true, true)];
        x.extend(s);
        out.push(x);
    }
    // Non-degenerate: at least two children, at most one of them special.
    for p in partitions(set) {
        if p.len() < 2 {
            continue;
        }
        let specials: Vec<Option<usize>> = if sigma_left >= 2 && levels >= 2 {
            std::iter::once(None).chain((0..p.len()).map(Some)).collect()
        } else {
            vec![None]
        };
        for sp in specials {
            if levels < 2 && p.iter().any(|b| b.len() >= 2) {
                continue;
            }
            let opts: Vec<Vec<Shape>> = p
                .iter()
                .enumerate()
                .filter(|(i, b)| Some(*i) == sp || b.len() >= 2)
                .map(|(i, b)| {
                    if Some(i) == sp {
                        special(b, levels - 1, sigma_left - 1)
                    } else {
                        below(b, levels - 1, true)
                            .into_iter()
                            .map(|mut s| {
                                s.insert(0, (b.clone(), true, false));
                                s
                            })
                            .collect()
                    }
                })
                .collect();
            for s in product(opts) {
                let mut x = vec![(set.to_vec(), false, true)];
                x.extend(s);
                out.push(x);
            }
        }
    }
    out
}

/// All tree shapes on `{1..n}` for the variant within the sampler bounds.
pub fn shapes(n: usize, variant: Variant) -> Vec<Vec<(Vec<usize>, bool, bool)>> {
    let v: Vec<usize> = (1..=n).collect();
    match variant {
        Variant::Finite => below(&v, MAX_DEPTH, false)
            .into_iter()
            .map(|mut s| {
                s.insert(0, (v.clone(), false, false));
                s
            })
            .collect(),
        Variant::Infinity => special(&v, MAX_DEPTH, MAX_SIGMA),
    }
}

fn shape_table(variant: Variant) -> &'static Vec<Vec<Shape>> {
    static FINITE: OnceLock<Vec<Vec<Shape>>> = OnceLock::new();
    static INFINITY: OnceLock<Vec<Vec<Shape>>> = OnceLock::new();
    match variant {
        Variant::Finite => FINITE.get_or_init(|| (2..=MAX_POINTS_FINITE).map(|n| shapes(n, variant)).collect()),
        Variant::Infinity => INFINITY.get_or_init(|| (1..=MAX_POINTS_INFINITY).map(|n| shapes(n, variant)).collect()),
    }
}

/// A tree with a uniformly drawn size, a uniformly drawn shape of that size
/// and uniformly drawn coherent basepoints. Witness points follow the
/// default rule.
pub fn random_tree<R: Rng>(rng: &mut R, variant: Variant) -> Tree {
    let table = shape_table(variant);
    let by_size = &table[rng.random_range(0..table.len())];
    let shape = by_size.choose(rng).expect("every size has a shape");
    let mut members: Vec<(Vec<usize>, bool, bool)> = shape.clone();
    members.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
    let mut bs: Vec<usize> = Vec::with_capacity(members.len());
    for i in 0..members.len() {
        let set = &members[i].0;
        let mother = (0..i).rev().find(|&j| set.iter().all(|p| members[j].0.contains(p)));
        let b = match mother {
            Some(j) if set.contains(&bs[j]) => bs[j],
            Some(_) => *set.choose(rng).expect("nonempty"),
            None => {
                // At infinity b(V) lies in the last special member.
                let last = members
                    .iter()
                    .filter(|m| m.2)
                    .min_by_key(|m| m.0.len())
                    .map_or(set, |m| &m.0);
                *last.choose(rng).expect("nonempty")
            }
        };
        bs.push(b);
    }
    NestedTree {
        v: members[0].0.clone(),
        members: members
            .iter()
            .zip(&bs)
            .map(|((set, degenerate, special), &b)| MemberJson {
                set: set.clone(),
                b,
                bprime: None,
                degenerate: *degenerate,
                special: *special,
            })
            .collect(),
        variant,
    }
    .build()
    .expect("sampled trees are valid")
}

fn gaussian<R: Rng>(rng: &mut R) -> V3 {
    V3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Unit field on `node`, zero on the child of `b`, constant on daughters,
/// random on the other children.
fn random_direction<R: Rng>(rng: &mut R, tree: &Tree, node: usize, zero_on: Option<usize>) -> Field {
    let nd = &tree.nodes[node];
    let mut f = field::zeros(tree.n_points());
    let base = tree.child_of(node, nd.b);
    let mut values = std::collections::HashMap::new();
    for &p in &nd.set {
        let child = tree.child_of(node, p);
        if zero_on.is_some_and(|z| tree.nodes[z].contains(p)) || (zero_on.is_none() && child == base) {
            continue;
        }
        f[p] = *values.entry(child).or_insert_with(|| gaussian(rng));
    }
    let n = field::norm(&f);
    field::scaled(&f, 1.0 / n)
}

/// A random admissible finite-variant chart point, scales in `[0, 0.4)`.
pub fn random_finite_point<R: Rng>(rng: &mut R, tree: &Tree) -> FiniteChartPoint {
    loop {
        let p = FiniteChartPoint {
            mu: (0..tree.nodes.len()).map(|_| rng.random_range(0.0..0.4)).collect(),
            u: gaussian(rng),
            w: (0..tree.nodes.len()).map(|a| random_direction(rng, tree, a, None)).collect(),
        };
        if admissible_v(tree, &p).is_ok() {
            return p;
        }
    }
}

/// A random admissible infinity-variant chart point, scales in `[0, 0.4)`.
pub fn random_infinity_point<R: Rng>(rng: &mut R, tree: &Tree) -> InfinityChartPoint {
    let sigma = tree.sigma();
    let deg = tree.degenerate_nodes();
    loop {
        let s = (0..sigma)
            .map(|i| {
                let c = tree.chain[i];
                let nd = &tree.nodes[c];
                if nd.degenerate {
                    let u = gaussian(rng).normalize();
                    let mut f = field::zeros(tree.n_points());
                    let k = (nd.set.len() as f64).sqrt();
                    for &p in &nd.set {
                        f[p] = u / k;
                    }
                    f
                } else {
                    // Zero exactly on the special daughter, if any.
                    let next = tree.chain.get(i + 1).copied();
                    match next {
                        Some(z) => random_direction(rng, tree, c, Some(z)),
                        None => {
                            let mut f = field::zeros(tree.n_points());
                            let mut values = std::collections::HashMap::new();
                            for &p in &nd.set {
                                f[p] = *values.entry(tree.child_of(c, p)).or_insert_with(|| gaussian(rng));
                            }
                            let n = field::norm(&f);
                            field::scaled(&f, 1.0 / n)
                        }
                    }
                }
            })
            .collect();
        let p = InfinityChartPoint {
            nu: (0..sigma).map(|_| rng.random_range(0.0..0.4)).collect(),
            s,
            mu: deg.iter().map(|&a| (a, rng.random_range(0.0..0.4))).collect::<BTreeMap<_, _>>(),
            w: deg.iter().map(|&a| (a, random_direction(rng, tree, a, None))).collect(),
        };
        if admissible_tildes(tree, &p).is_ok() {
            return p;
        }
    }
}
