use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::diagram_core::canon::{canonical_labeling, vertex_automorphisms, CanonKey};
use crate::diagram_core::diagram::{HalfEdge, JacobiDiagram};
use crate::diagram_core::labelled::LabelledDiagram;
use crate::diagram_core::orientation::VertexOrientation;
use crate::error::{Error, Result};

/// Vertex-oriented diagram. Half-edge `2e + end` sits at `edges[e][end]`;
/// `orientation[v]` is the cyclic order of the three half-edges at `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedDiagram {
    pub nv: usize,
    pub edges: Vec<[usize; 2]>,
    pub orientation: Vec<[usize; 3]>,
}

/// Basis symbol of the free space: a canonical graph and the parity of the
/// number of vertices where the orientation differs from the reference one.
/// Graphs with an orientation-reversing automorphism only get parity 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub key: CanonKey,
    pub parity: u8,
}

impl Generator {
    pub fn degree(&self) -> usize {
        self.key.degree()
    }

    pub fn empty() -> Self {
        Generator {
            key: CanonKey::empty(),
            parity: 0,
        }
    }

    /// An oriented representative of this generator.
    pub fn representative(&self) -> OrientedDiagram {
        let mut d = OrientedDiagram::reference(self.key.nv, self.key.edge_list());
        if self.parity == 1 {
            d = d.reversed_at(0);
        }
        d
    }
}

/// `Some(true)` if `b` is a rotation of `a`, `Some(false)` if it is a
/// rotation of the reverse, `None` if the entries differ.
pub fn same_cyclic(a: [usize; 3], b: [usize; 3]) -> Option<bool> {
    for r in 0..3 {
        if [a[r], a[(r + 1) % 3], a[(r + 2) % 3]] == b {
            return Some(true);
        }
        if [a[r], a[(r + 2) % 3], a[(r + 1) % 3]] == b {
            return Some(false);
        }
    }
    None
}

impl OrientedDiagram {
    pub fn empty() -> Self {
        OrientedDiagram {
            nv: 0,
            edges: vec![],
            orientation: vec![],
        }
    }

    pub fn degree(&self) -> usize {
        self.nv / 2
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.edges[h / 2][h % 2]
    }

    /// Half-edges at each vertex in increasing order.
    pub fn incidence(nv: usize, edges: &[[usize; 2]]) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); nv];
        for (e, pair) in edges.iter().enumerate() {
            inc[pair[0]].push(2 * e);
            inc[pair[1]].push(2 * e + 1);
        }
        inc
    }

    /// Each vertex oriented by the increasing order of its half-edges.
    pub fn reference(nv: usize, edges: Vec<[usize; 2]>) -> Self {
        let orientation = Self::incidence(nv, &edges)
            .into_iter()
            .map(|hs| [hs[0], hs[1], hs[2]])
            .collect();
        OrientedDiagram {
            nv,
            edges,
            orientation,
        }
    }

    pub fn reversed_at(&self, v: usize) -> Self {
        let mut d = self.clone();
        d.orientation[v].swap(1, 2);
        d
    }

    pub fn validate(&self) -> Result<()> {
        if self.orientation.len() != self.nv || 2 * self.edges.len() != 3 * self.nv {
            return Err(Error::InvariantViolation("inconsistent sizes".into()));
        }
        let inc = Self::incidence(self.nv, &self.edges);
        for (v, t) in self.orientation.iter().enumerate() {
            if self.edges.iter().any(|e| e[0] == e[1] || e[0] >= self.nv || e[1] >= self.nv) {
                return Err(Error::InvariantViolation("bad edge".into()));
            }
            let mut s = t.to_vec();
            s.sort();
            if s != inc[v] {
                return Err(Error::InvariantViolation(format!(
                    "orientation at vertex {v} does not list its half-edges"
                )));
            }
        }
        Ok(())
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift_v = self.nv;
        let shift_h = 2 * self.edges.len();
        let mut d = self.clone();
        d.nv += other.nv;
        d.edges
            .extend(other.edges.iter().map(|e| [e[0] + shift_v, e[1] + shift_v]));
        d.orientation
            .extend(other.orientation.iter().map(|t| t.map(|h| h + shift_h)));
        d
    }

    /// Reads a diagram carrying vertex orientations.
    pub fn from_jacobi(g: &JacobiDiagram) -> Result<Self> {
        if g.n_vertices() == 0 {
            return Ok(Self::empty());
        }
        let vo = g
            .vertex_orientation
            .as_ref()
            .ok_or_else(|| Error::MissingOrientation("vertex orientation".into()))?;
        let d = OrientedDiagram {
            nv: g.n_vertices(),
            edges: g.edges.clone(),
            orientation: vo.iter().map(|t| t.map(HalfEdge::id)).collect(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn to_jacobi(&self) -> JacobiDiagram {
        let mut g = JacobiDiagram::from_edges(self.nv, self.edges.clone())
            .expect("oriented diagrams hold valid graphs");
        if self.nv > 0 {
            g.vertex_orientation = Some(
                self.orientation
                    .iter()
                    .map(|t| t.map(HalfEdge::from_id))
                    .collect(),
            );
        }
        g
    }

    /// Labelled diagram with a vertex orientation, edge `l` oriented
    /// origin (end 0) to end (end 1).
    pub fn from_labelled(g: &LabelledDiagram, vo: &VertexOrientation) -> Result<Self> {
        let d = OrientedDiagram {
            nv: g.n_vertices(),
            edges: g.edge_list(),
            orientation: vo.iter().map(|t| t.map(|(e, end)| 2 * e + end)).collect(),
        };
        d.validate()?;
        Ok(d)
    }

    /// The three terms I, H, X of the relation at edge `e`, with `None` for
    /// a term whose reconnection creates a loop.
    ///
    /// Writing the cyclic orders at the ends `u`, `v` of `e` as `(e_u, a, b)`
    /// and `(e_v, c, d)`, H has `(e_u, a, c)`, `(e_v, d, b)` and X has
    /// `(e_u, a, d)`, `(e_v, b, c)`; the relation is I + H + X = 0.
    pub fn ihx_terms(&self, e: usize) -> [Option<OrientedDiagram>; 3] {
        let [u, v] = self.edges[e];
        let (eu, ev) = (2 * e, 2 * e + 1);
        let rot = |t: [usize; 3], first: usize| {
            let r = t.iter().position(|&h| h == first).expect("incident");
            [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
        };
        let [_, a, b] = rot(self.orientation[u], eu);
        let [_, c, d] = rot(self.orientation[v], ev);
        let build = |ou: [usize; 3], ov: [usize; 3], to_u: usize, to_v: usize| {
            let mut g = self.clone();
            g.orientation[u] = ou;
            g.orientation[v] = ov;
            g.edges[to_u / 2][to_u % 2] = u;
            g.edges[to_v / 2][to_v % 2] = v;
            if g.edges.iter().any(|p| p[0] == p[1]) {
                None
            } else {
                Some(g)
            }
        };
        [
            Some(self.clone()),
            build([eu, a, c], [ev, d, b], c, b),
            build([eu, a, d], [ev, b, c], d, b),
        ]
    }
}

/// Matches the edges of `edges` relabelled by `perm` against the canonical
/// edge list, parallel edges first-unused, and returns the half-edge map.
fn half_edge_map(edges: &[[usize; 2]], perm: &[usize], target: &[[usize; 2]]) -> Vec<usize> {
    let mut used = vec![false; target.len()];
    let mut map = vec![0; 2 * edges.len()];
    for (e, pair) in edges.iter().enumerate() {
        let (a, b) = (perm[pair[0]], perm[pair[1]]);
        let (lo, hi) = (a.min(b), a.max(b));
        let c = (0..target.len())
            .find(|&c| !used[c] && target[c] == [lo, hi])
            .expect("relabelled edge present in the canonical list");
        used[c] = true;
        map[2 * e] = 2 * c + usize::from(a != lo);
        map[2 * e + 1] = 2 * c + usize::from(b != lo);
    }
    map
}

fn parity_against_reference(orient: &[[usize; 3]], reference: &[[usize; 3]]) -> u8 {
    let flips = orient
        .iter()
        .zip(reference)
        .filter(|(o, r)| !same_cyclic(**r, **o).expect("same half-edges"))
        .count();
    (flips % 2) as u8
}

fn odd_cache() -> &'static RwLock<HashMap<CanonKey, bool>> {
    static CACHE: OnceLock<RwLock<HashMap<CanonKey, bool>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Whether the canonical graph has an automorphism reversing the
/// orientation at an odd number of vertices. Swapping two parallel edges
/// reverses both of their endpoints, so one edge matching per vertex
/// automorphism suffices.
pub fn has_odd_automorphism(key: &CanonKey) -> bool {
    if let Some(&b) = odd_cache().read().expect("cache lock").get(key) {
        return b;
    }
    let edges = key.edge_list();
    let reference = OrientedDiagram::reference(key.nv, edges.clone());
    let odd = vertex_automorphisms(key.nv, &edges).iter().any(|perm| {
        let map = half_edge_map(&edges, perm, &edges);
        let mut pushed = vec![[0; 3]; key.nv];
        for (v, t) in reference.orientation.iter().enumerate() {
            pushed[perm[v]] = t.map(|h| map[h]);
        }
        parity_against_reference(&pushed, &reference.orientation) == 1
    });
    odd_cache().write().expect("cache lock").insert(key.clone(), odd);
    odd
}

/// The generator of the free space carrying this oriented diagram.
pub fn canonical_generator(d: &OrientedDiagram) -> Generator {
    let (key, perm) = canonical_labeling(d.nv, &d.edges);
    if d.nv == 0 || has_odd_automorphism(&key) {
        return Generator { key, parity: 0 };
    }
    let target = key.edge_list();
    let map = half_edge_map(&d.edges, &perm, &target);
    let mut pushed = vec![[0; 3]; d.nv];
    for (v, t) in d.orientation.iter().enumerate() {
        pushed[perm[v]] = t.map(|h| map[h]);
    }
    let reference = OrientedDiagram::reference(key.nv, target);
    let parity = parity_against_reference(&pushed, &reference.orientation);
    Generator { key, parity }
}

/// Every vertex orientation of a graph, indexed by a bit mask of reversals
/// relative to the reference.
pub fn all_orientations(nv: usize, edges: &[[usize; 2]]) -> Vec<OrientedDiagram> {
    let reference = OrientedDiagram::reference(nv, edges.to_vec());
    (0..1usize << nv)
        .map(|mask| {
            let mut d = reference.clone();
            for v in 0..nv {
                if mask >> v & 1 == 1 {
                    d.orientation[v].swap(1, 2);
                }
            }
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_core::canon::canonical_form;

    #[test]
    fn cyclic_comparison() {
        assert_eq!(same_cyclic([1, 2, 3], [2, 3, 1]), Some(true));
        assert_eq!(same_cyclic([1, 2, 3], [2, 1, 3]), Some(false));
        assert_eq!(same_cyclic([1, 2, 3], [1, 2, 4]), None);
    }

    #[test]
    fn reversing_one_vertex_changes_the_generator() {
        for g in [JacobiDiagram::theta(), JacobiDiagram::k4(), JacobiDiagram::doubled_square()] {
            let d = OrientedDiagram::reference(g.n_vertices(), g.edges.clone());
            let key = canonical_form(&g);
            let g0 = canonical_generator(&d);
            let g1 = canonical_generator(&d.reversed_at(0));
            assert_eq!(g0.key, key);
            if has_odd_automorphism(&key) {
                assert_eq!(g0, g1);
            } else {
                assert_ne!(g0.parity, g1.parity);
                assert_eq!(canonical_generator(&d.reversed_at(0).reversed_at(1)), g0);
            }
        }
    }

    #[test]
    fn generator_is_invariant_under_relabelling() {
        let g = JacobiDiagram::k4();
        let base = OrientedDiagram::reference(4, g.edges.clone()).reversed_at(2);
        let gen = canonical_generator(&base);
        for perm in crate::diagram_core::canon::tests::all_perms(4) {
            let mut edges: Vec<[usize; 2]> =
                base.edges.iter().map(|e| [perm[e[1]], perm[e[0]]]).collect();
            edges.reverse();
            let ne = edges.len();
            // old edge e sits at index ne-1-e with its ends swapped
            let hmap = |h: usize| 2 * (ne - 1 - h / 2) + (1 - h % 2);
            let mut orientation = vec![[0; 3]; 4];
            for v in 0..4 {
                orientation[perm[v]] = base.orientation[v].map(hmap);
            }
            let d = OrientedDiagram {
                nv: 4,
                edges,
                orientation,
            };
            d.validate().unwrap();
            assert_eq!(canonical_generator(&d), gen);
        }
    }

    #[test]
    fn representative_round_trips() {
        for key in crate::diagram_core::generate::generate_keys(3, false, 4).unwrap() {
            for parity in 0..2u8 {
                let g = Generator {
                    key: key.clone(),
                    parity,
                };
                let expected = if has_odd_automorphism(&key) {
                    Generator { key: key.clone(), parity: 0 }
                } else {
                    g.clone()
                };
                assert_eq!(canonical_generator(&g.representative()), expected);
            }
        }
    }

    #[test]
    fn ihx_terms_keep_half_edge_sets() {
        let d = OrientedDiagram::reference(4, JacobiDiagram::k4().edges);
        for e in 0..6 {
            let terms = d.ihx_terms(e);
            for t in terms.iter().flatten() {
                t.validate().unwrap();
            }
        }
        // In theta, H is a dumbbell with loops and X is again a theta.
        let th = OrientedDiagram::reference(2, JacobiDiagram::theta().edges);
        let terms = th.ihx_terms(0);
        assert!(terms[1].is_none());
        let x = terms[2].as_ref().unwrap();
        assert_eq!(canonical_generator(x).key, canonical_form(&JacobiDiagram::theta()));
    }
}
