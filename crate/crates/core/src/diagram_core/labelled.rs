use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::automorphism::{count_automorphisms, factorial};
use super::diagram::{is_connected, JacobiDiagram};
use super::generate::generate_keys;
use crate::config::Limits;
use crate::error::{Error, Result};

/// Vertex-labelled, edge-labelled, edge-oriented diagram.
///
/// Vertex `i` carries label `i + 1`; `arcs[l]` is the edge with label
/// `l + 1`, written `(origin, end)`. Two such diagrams are equal as labelled
/// objects exactly when their arc lists coincide.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelledDiagram {
    pub arcs: Vec<(u8, u8)>,
}

/// Half-edge of a labelled diagram: `(edge index, 0 for origin | 1 for end)`.
pub type LabelledHalfEdge = (usize, usize);

impl LabelledDiagram {
    pub fn new(arcs: Vec<(u8, u8)>) -> Result<Self> {
        let g = LabelledDiagram { arcs };
        g.validate()?;
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.arcs.len() / 3
    }

    pub fn n_vertices(&self) -> usize {
        2 * self.degree()
    }

    pub fn vertex_of(&self, h: LabelledHalfEdge) -> usize {
        let (o, t) = self.arcs[h.0];
        if h.1 == 0 {
            o as usize
        } else {
            t as usize
        }
    }

    pub fn edge_list(&self) -> Vec<[usize; 2]> {
        self.arcs
            .iter()
            .map(|&(a, b)| [a as usize, b as usize])
            .collect()
    }

    /// Half-edges at each vertex, sorted.
    pub fn incidence(&self) -> Vec<Vec<LabelledHalfEdge>> {
        let mut inc = vec![Vec::new(); self.n_vertices()];
        for e in 0..self.arcs.len() {
            for end in 0..2 {
                inc[self.vertex_of((e, end))].push((e, end));
            }
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.n_vertices(), &self.edge_list())
    }

    pub fn validate(&self) -> Result<()> {
        if self.arcs.len() % 3 != 0 {
            return Err(Error::InvariantViolation(
                "edge count must be a multiple of 3".into(),
            ));
        }
        let nv = self.n_vertices();
        let mut deg = vec![0; nv];
        for &(a, b) in &self.arcs {
            let (a, b) = (a as usize, b as usize);
            if a >= nv || b >= nv {
                return Err(Error::InvariantViolation("vertex label out of range".into()));
            }
            if a == b {
                return Err(Error::InvariantViolation("simple loop".into()));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg.iter().any(|&d| d != 3) {
            return Err(Error::InvariantViolation("not trivalent".into()));
        }
        Ok(())
    }

    /// Decorated diagram with ids and labels `1..`, edge index = label - 1.
    pub fn to_diagram(&self) -> JacobiDiagram {
        let nv = self.n_vertices();
        JacobiDiagram {
            vertices: (1..=nv as i64).collect(),
            edges: self.edge_list(),
            vertex_orientation: None,
            edge_orientation: Some(self.edge_list()),
            vertex_labels: Some((1..=nv).collect()),
            edge_labels: Some((1..=self.arcs.len()).collect()),
        }
    }

    /// Reads labels and edge orientation off a decorated diagram.
    pub fn from_diagram(g: &JacobiDiagram) -> Result<Self> {
        let vl = g
            .vertex_labels
            .as_ref()
            .ok_or_else(|| Error::MissingLabels("vertex labels".into()))?;
        let el = g
            .edge_labels
            .as_ref()
            .ok_or_else(|| Error::MissingLabels("edge labels".into()))?;
        let eo = g
            .edge_orientation
            .as_ref()
            .ok_or_else(|| Error::MissingOrientation("edge orientation".into()))?;
        g.validate()?;
        let mut arcs = vec![(0u8, 0u8); g.edges.len()];
        for (e, o) in eo.iter().enumerate() {
            arcs[el[e] - 1] = ((vl[o[0]] - 1) as u8, (vl[o[1]] - 1) as u8);
        }
        LabelledDiagram::new(arcs)
    }
}

/// The set of connected labelled edge-oriented diagrams of degree `n`,
/// sorted, each listed once.
pub fn enumerate_labelled(n: usize) -> Result<Vec<LabelledDiagram>> {
    enumerate_labelled_bounded(n, Limits::default().max_labelled_degree)
}

pub fn enumerate_labelled_bounded(n: usize, bound: usize) -> Result<Vec<LabelledDiagram>> {
    if n > bound {
        return Err(Error::DegreeTooLarge { degree: n, bound });
    }
    if n == 0 {
        return Err(Error::InvariantViolation(
            "labelled diagrams need degree at least 1".into(),
        ));
    }
    let nv = 2 * n;
    let mut out = Vec::new();
    let mut deg = vec![0u8; nv];
    let mut arcs = Vec::with_capacity(3 * n);
    extend_arcs(nv, 3 * n, &mut deg, &mut arcs, &mut out);
    Ok(out)
}

fn extend_arcs(
    nv: usize,
    ne: usize,
    deg: &mut [u8],
    arcs: &mut Vec<(u8, u8)>,
    out: &mut Vec<LabelledDiagram>,
) {
    if arcs.len() == ne {
        let g = LabelledDiagram { arcs: arcs.clone() };
        if g.is_connected() {
            out.push(g);
        }
        return;
    }
    // Remaining capacity must match the remaining edge ends exactly.
    let free: usize = deg.iter().map(|&d| 3 - d as usize).sum();
    if free != 2 * (ne - arcs.len()) {
        return;
    }
    for a in 0..nv {
        if deg[a] >= 3 {
            continue;
        }
        for b in 0..nv {
            if b == a || deg[b] >= 3 {
                continue;
            }
            deg[a] += 1;
            deg[b] += 1;
            arcs.push((a as u8, b as u8));
            extend_arcs(nv, ne, deg, arcs, out);
            arcs.pop();
            deg[a] -= 1;
            deg[b] -= 1;
        }
    }
}

/// Closed-form size of the labelled set: the sum over connected classes of
/// `2^(3n) (2n)! (3n)! / #Aut`.
pub fn labelled_count_formula(n: usize) -> Result<BigUint> {
    let keys = generate_keys(n, true, Limits::default().max_degree.max(n))?;
    let mut total = BigUint::zero();
    for k in keys {
        total += labelled_count_for(&k.diagram());
    }
    Ok(total)
}

/// `2^(3n) (2n)! (3n)! / #Aut(g)` for one diagram.
pub fn labelled_count_for(g: &JacobiDiagram) -> BigUint {
    let n = g.degree() as u64;
    let num = BigUint::from(1u8) << (3 * n) as usize;
    let num = num * BigUint::from(factorial(2 * n)) * BigUint::from(factorial(3 * n));
    let aut = BigUint::from(count_automorphisms(g));
    debug_assert!((&num % &aut).is_zero());
    num / aut
}

/// `(2n)! (3n)! / #Aut(g)`: labellings before edge orientations are chosen.
pub fn labellings_for(g: &JacobiDiagram) -> BigUint {
    let n = g.degree() as u64;
    let num = BigUint::from(factorial(2 * n)) * BigUint::from(factorial(3 * n));
    let aut = BigUint::from(count_automorphisms(g));
    if aut.is_one() {
        num
    } else {
        num / aut
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_core::canon::canonical_form;

    #[test]
    fn degree_one_has_eight() {
        let e1 = enumerate_labelled(1).unwrap();
        assert_eq!(e1.len(), 8);
        assert_eq!(labelled_count_formula(1).unwrap(), BigUint::from(8u32));
        let theta = canonical_form(&JacobiDiagram::theta());
        assert!(e1.iter().all(|g| canonical_form(&g.to_diagram()) == theta));
        assert_eq!(labellings_for(&JacobiDiagram::theta()), BigUint::from(1u32));
    }

    #[test]
    fn degree_two_formula_matches_enumeration() {
        let e2 = enumerate_labelled(2).unwrap();
        assert_eq!(BigUint::from(e2.len()), labelled_count_formula(2).unwrap());
        assert_eq!(e2.len(), 115_200);
        let mut sorted = e2.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), e2.len());
    }

    #[test]
    fn diagram_conversion_round_trips() {
        let g = LabelledDiagram::new(vec![(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(LabelledDiagram::from_diagram(&g.to_diagram()).unwrap(), g);
        let mut d = g.to_diagram();
        d.edge_labels = None;
        assert!(matches!(
            LabelledDiagram::from_diagram(&d),
            Err(Error::MissingLabels(_))
        ));
    }
}
