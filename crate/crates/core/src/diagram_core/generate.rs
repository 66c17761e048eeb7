use std::collections::BTreeSet;

use rayon::prelude::*;

use super::canon::{canonical_labeling, CanonKey};
use super::diagram::{is_connected, JacobiDiagram};
use crate::config::Limits;
use crate::error::{Error, Result};

/// One representative per isomorphism class of degree-`n` diagrams, sorted
/// by canonical key. With `connected` set, disconnected diagrams are dropped.
pub fn generate_diagrams(n: usize, connected: bool) -> Result<Vec<JacobiDiagram>> {
    generate_diagrams_bounded(n, connected, Limits::default().max_degree)
}

pub fn generate_diagrams_bounded(
    n: usize,
    connected: bool,
    bound: usize,
) -> Result<Vec<JacobiDiagram>> {
    Ok(generate_keys(n, connected, bound)?
        .iter()
        .map(CanonKey::diagram)
        .collect())
}

pub fn generate_keys(n: usize, connected: bool, bound: usize) -> Result<Vec<CanonKey>> {
    if n > bound {
        return Err(Error::DegreeTooLarge { degree: n, bound });
    }
    if n == 0 {
        return Ok(vec![CanonKey::empty()]);
    }
    let nv = 2 * n;
    let mut raw = Vec::new();
    let mut deg = vec![0usize; nv];
    let mut edges = Vec::new();
    fill(nv, &mut deg, &mut edges, &mut raw);
    let keys: BTreeSet<CanonKey> = raw
        .par_iter()
        .filter(|es: &&Vec<[usize; 2]>| !connected || is_connected(nv, es))
        .map(|es| canonical_labeling(nv, es).0)
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(keys.into_iter().collect())
}

/// Trivalent loopless edge multisets on `nv` vertices. Vertices are
/// saturated in index order; partners of one vertex are chosen in
/// nondecreasing order, and an untouched vertex may only be used if it is
/// the first untouched one, which removes most relabelled duplicates.
fn fill(nv: usize, deg: &mut [usize], edges: &mut Vec<[usize; 2]>, out: &mut Vec<Vec<[usize; 2]>>) {
    let Some(u) = (0..nv).find(|&v| deg[v] < 3) else {
        out.push(edges.clone());
        return;
    };
    let min_partner = edges
        .iter()
        .rev()
        .take_while(|e| e[0] == u)
        .map(|e| e[1])
        .next()
        .unwrap_or(u + 1);
    let first_fresh = (0..nv).find(|&v| deg[v] == 0 && v != u);
    for v in min_partner.max(u + 1)..nv {
        if deg[v] >= 3 {
            continue;
        }
        if deg[v] == 0 && Some(v) != first_fresh {
            continue;
        }
        deg[u] += 1;
        deg[v] += 1;
        edges.push([u, v]);
        fill(nv, deg, edges, out);
        edges.pop();
        deg[u] -= 1;
        deg[v] -= 1;
    }
}
