//! Canonical forms of loopless multigraphs by individualization and
//! colour refinement. The search explores every leaf of the refinement tree
//! and keeps the lexicographically least relabelled edge list, so the result
//! is an isomorphism invariant.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::diagram::JacobiDiagram;

/// Canonical unoriented graph: vertex count plus the sorted edge list of the
/// canonically relabelled graph, each edge written `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonKey {
    pub nv: usize,
    pub edges: Vec<(u8, u8)>,
}

impl CanonKey {
    pub fn empty() -> Self {
        CanonKey { nv: 0, edges: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.nv / 2
    }

    pub fn edge_list(&self) -> Vec<[usize; 2]> {
        self.edges
            .iter()
            .map(|&(a, b)| [a as usize, b as usize])
            .collect()
    }

    pub fn diagram(&self) -> JacobiDiagram {
        JacobiDiagram::from_edges(self.nv, self.edge_list()).expect("canonical keys are valid")
    }
}

fn multiplicities(nv: usize, edges: &[[usize; 2]]) -> Vec<Vec<u8>> {
    let mut m = vec![vec![0u8; nv]; nv];
    for e in edges {
        m[e[0]][e[1]] += 1;
        m[e[1]][e[0]] += 1;
    }
    m
}

fn rank_by<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present") as u32)
        .collect()
}

fn refine(mult: &[Vec<u8>], colors: &[u32]) -> Vec<u32> {
    let nv = colors.len();
    let mut current = colors.to_vec();
    let mut count = distinct(&current);
    loop {
        let sigs: Vec<(u32, Vec<(u32, u8)>)> = (0..nv)
            .map(|v| {
                let mut nb: Vec<(u32, u8)> = (0..nv)
                    .filter(|&u| mult[v][u] > 0)
                    .map(|u| (current[u], mult[v][u]))
                    .collect();
                nb.sort();
                (current[v], nb)
            })
            .collect();
        let next = rank_by(&sigs);
        let next_count = distinct(&next);
        if next_count == count {
            return next;
        }
        current = next;
        count = next_count;
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort();
    c.dedup();
    c.len()
}

fn encode(edges: &[[usize; 2]], perm: &[usize]) -> Vec<(u8, u8)> {
    let mut out: Vec<(u8, u8)> = edges
        .iter()
        .map(|e| {
            let (a, b) = (perm[e[0]] as u8, perm[e[1]] as u8);
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort();
    out
}

struct Search<'a> {
    mult: &'a [Vec<u8>],
    edges: &'a [[usize; 2]],
    best: Option<(Vec<(u8, u8)>, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, colors: Vec<u32>) {
        let colors = refine(self.mult, &colors);
        let nv = colors.len();
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (v, &c) in colors.iter().enumerate() {
            cells[c as usize].push(v);
        }
        match cells.iter().position(|c| c.len() > 1) {
            None => {
                let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
                let code = encode(self.edges, &perm);
                let better = match &self.best {
                    None => true,
                    Some((b, _)) => code.cmp(b) == Ordering::Less,
                };
                if better {
                    self.best = Some((code, perm));
                }
            }
            Some(ci) => {
                for &v in &cells[ci] {
                    let keys: Vec<(u32, u8)> = colors
                        .iter()
                        .enumerate()
                        .map(|(w, &c)| (c, u8::from(w != v)))
                        .collect();
                    self.run(rank_by(&keys));
                }
            }
        }
    }
}

/// Canonical key and a canonical relabelling `perm[old] = new`.
pub fn canonical_labeling(nv: usize, edges: &[[usize; 2]]) -> (CanonKey, Vec<usize>) {
    if nv == 0 {
        return (CanonKey::empty(), vec![]);
    }
    let mult = multiplicities(nv, edges);
    let mut s = Search {
        mult: &mult,
        edges,
        best: None,
    };
    s.run(vec![0; nv]);
    let (code, perm) = s.best.expect("search reaches a leaf");
    (CanonKey { nv, edges: code }, perm)
}

pub fn canonical_form(g: &JacobiDiagram) -> CanonKey {
    canonical_labeling(g.n_vertices(), &g.edges).0
}

pub fn is_isomorphic(g1: &JacobiDiagram, g2: &JacobiDiagram) -> bool {
    canonical_form(g1) == canonical_form(g2)
}

/// All vertex permutations preserving edge multiplicities.
pub fn vertex_automorphisms(nv: usize, edges: &[[usize; 2]]) -> Vec<Vec<usize>> {
    let mult = multiplicities(nv, edges);
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; nv];
    let mut used = vec![false; nv];
    extend_automorphism(&mult, 0, &mut map, &mut used, &mut out);
    out
}

fn extend_automorphism(
    mult: &[Vec<u8>],
    v: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let nv = mult.len();
    if v == nv {
        out.push(map.clone());
        return;
    }
    for target in 0..nv {
        if used[target] {
            continue;
        }
        let consistent = (0..v).all(|u| mult[u][v] == mult[map[u]][target]);
        if !consistent {
            continue;
        }
        map[v] = target;
        used[target] = true;
        extend_automorphism(mult, v + 1, map, used, out);
        used[target] = false;
    }
    map[v] = usize::MAX;
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn permuted(g: &JacobiDiagram, perm: &[usize]) -> JacobiDiagram {
        let edges = g
            .edges
            .iter()
            .rev()
            .map(|e| [perm[e[1]], perm[e[0]]])
            .collect();
        JacobiDiagram::from_edges(g.n_vertices(), edges).unwrap()
    }

    #[test]
    fn relabelling_invariance() {
        let th = JacobiDiagram::theta();
        let th2 = JacobiDiagram::from_edges(2, vec![[1, 0], [0, 1], [1, 0]]).unwrap();
        assert_eq!(canonical_form(&th), canonical_form(&th2));
        let k4 = JacobiDiagram::k4();
        assert_ne!(canonical_form(&th), canonical_form(&k4));
        let ds = JacobiDiagram::doubled_square();
        let alt = JacobiDiagram::from_edges(
            4,
            vec![[0, 3], [3, 0], [1, 2], [2, 1], [0, 1], [2, 3]],
        )
        .unwrap();
        assert!(is_isomorphic(&ds, &alt));
        assert!(!is_isomorphic(&ds, &k4));
        assert!(!is_isomorphic(&ds, &JacobiDiagram::theta_theta()));
    }

    #[test]
    fn canonical_form_is_stable_under_all_vertex_permutations() {
        let g = JacobiDiagram::doubled_square();
        let key = canonical_form(&g);
        for perm in all_perms(4) {
            assert_eq!(canonical_form(&permuted(&g, &perm)), key);
        }
    }

    #[test]
    fn key_rebuilds_an_isomorphic_graph() {
        for g in [JacobiDiagram::k4(), JacobiDiagram::theta_theta()] {
            let key = canonical_form(&g);
            assert_eq!(canonical_form(&key.diagram()), key);
        }
    }

    #[test]
    fn vertex_automorphism_counts() {
        assert_eq!(vertex_automorphisms(4, &JacobiDiagram::k4().edges).len(), 24);
        assert_eq!(vertex_automorphisms(2, &JacobiDiagram::theta().edges).len(), 2);
        assert_eq!(
            vertex_automorphisms(4, &JacobiDiagram::doubled_square().edges).len(),
            4
        );
    }

    pub(crate) fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
}
