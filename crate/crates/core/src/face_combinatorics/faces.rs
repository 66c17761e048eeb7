use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram_core::diagram::{is_connected, JacobiDiagram};
use crate::diagram_core::labelled::LabelledDiagram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ambient {
    /// Configurations of `V` in the manifold.
    CV,
    /// Configurations of `V` in tangent space, up to translation and dilation.
    SV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceKind {
    /// `F(∞;B)`: the points of `B` go to infinity.
    Infinity,
    /// `F(B)`: the points of `B` collide at a point of the manifold.
    Collapse,
    /// `f(B)`: the points of `B` collide inside a configuration of `S_V`.
    Anomaly,
}

/// A codimension-one face. `set` holds vertex labels `1..=|V|`, increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceDescriptor {
    pub kind: FaceKind,
    pub set: Vec<usize>,
    pub ambient: Ambient,
    pub n_points: usize,
}

impl FaceDescriptor {
    /// Bit mask of the subset over 0-based vertex indices.
    pub fn mask(&self) -> u32 {
        self.set.iter().fold(0, |m, &l| m | 1 << (l - 1))
    }

    pub fn is_whole(&self) -> bool {
        self.set.len() == self.n_points
    }
}

impl fmt::Display for FaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = if self.is_whole() {
            "V".to_string()
        } else {
            let items: Vec<String> = self.set.iter().map(|l| l.to_string()).collect();
            format!("{{{}}}", items.join(","))
        };
        match self.kind {
            FaceKind::Infinity => write!(f, "F(∞;{b})"),
            FaceKind::Collapse => write!(f, "F({b})"),
            FaceKind::Anomaly => write!(f, "f({b})"),
        }
    }
}

fn subset_labels(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Codimension-one faces of `C_V` (`F(∞;B)` for nonempty `B`, then `F(B)`
/// for `#B ≥ 2`) or of `S_V` (`f(B)` for strict `B` with `#B ≥ 2`), subsets
/// in increasing bit-mask order.
pub fn enumerate_faces(n_points: usize, ambient: Ambient) -> Result<Vec<FaceDescriptor>> {
    let min = match ambient {
        Ambient::CV => 1,
        Ambient::SV => 2,
    };
    if n_points < min {
        return Err(Error::EmptyV);
    }
    if n_points > 20 {
        return Err(Error::MalformedInput("at most 20 points".into()));
    }
    let full: u32 = (1u32 << n_points) - 1;
    let face = |kind, mask: u32| FaceDescriptor {
        kind,
        set: subset_labels(mask),
        ambient,
        n_points,
    };
    let mut out = Vec::new();
    match ambient {
        Ambient::CV => {
            out.extend((1..=full).map(|m| face(FaceKind::Infinity, m)));
            out.extend(
                (1..=full)
                    .filter(|m| m.count_ones() >= 2)
                    .map(|m| face(FaceKind::Collapse, m)),
            );
        }
        Ambient::SV => {
            out.extend(
                (1..full)
                    .filter(|m| m.count_ones() >= 2)
                    .map(|m| face(FaceKind::Anomaly, m)),
            );
        }
    }
    Ok(out)
}

/// Closed-form face counts: `(2^k - 1) + (2^k - k - 1)` for `C_V` and
/// `2^k - k - 2` for `S_V`, with `k = |V|`.
pub fn face_count_formula(n_points: usize, ambient: Ambient) -> usize {
    let p = 1usize << n_points;
    match ambient {
        Ambient::CV => (p - 1) + (p - n_points - 1),
        Ambient::SV => p - n_points - 2,
    }
}

/// `Γ_B`: the vertices of `B` and the edges with both ends in `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedSubgraph {
    /// Vertex ids, in the diagram's vertex order.
    pub vertices: Vec<i64>,
    /// Edge indices of the diagram.
    pub edges: Vec<usize>,
    pub connected: bool,
}

/// Induced subgraph on the vertex ids in `b`.
pub fn induced_subgraph(g: &JacobiDiagram, b: &[i64]) -> Result<InducedSubgraph> {
    let mut inside = vec![false; g.n_vertices()];
    for id in b {
        let v = g
            .vertices
            .iter()
            .position(|x| x == id)
            .ok_or(Error::UnknownVertex(*id))?;
        inside[v] = true;
    }
    let verts: Vec<usize> = (0..g.n_vertices()).filter(|&v| inside[v]).collect();
    let edges: Vec<usize> = (0..g.edges.len())
        .filter(|&e| inside[g.edges[e][0]] && inside[g.edges[e][1]])
        .collect();
    let local = |v: usize| verts.iter().position(|&w| w == v).expect("inside");
    let local_edges: Vec<[usize; 2]> = edges
        .iter()
        .map(|&e| [local(g.edges[e][0]), local(g.edges[e][1])])
        .collect();
    Ok(InducedSubgraph {
        vertices: verts.iter().map(|&v| g.vertices[v]).collect(),
        connected: is_connected(verts.len(), &local_edges),
        edges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum FaceClassification {
    VanishesAtInfinity,
    VanishesDisconnected,
    VanishesUnivalent,
    /// `vertex`: label of the vertex of `B` with smallest label meeting
    /// exactly two edges of `Γ_B`.
    CancelsBySigma { vertex: usize },
    /// `Γ_B` is the single edge with label `edge`, oriented from vertex
    /// label `from` to `to`.
    IHXFamily { edge: usize, from: usize, to: usize },
    AnomalyFaceFV,
}

impl FaceClassification {
    pub fn name(&self) -> &'static str {
        match self {
            FaceClassification::VanishesAtInfinity => "VanishesAtInfinity",
            FaceClassification::VanishesDisconnected => "VanishesDisconnected",
            FaceClassification::VanishesUnivalent => "VanishesUnivalent",
            FaceClassification::CancelsBySigma { .. } => "CancelsBySigma",
            FaceClassification::IHXFamily { .. } => "IHXFamily",
            FaceClassification::AnomalyFaceFV => "AnomalyFaceFV",
        }
    }
}

/// Edge labels (0-based) of `Γ_B` meeting vertex index `v`.
fn inner_edges_at(g: &LabelledDiagram, mask: u32, v: usize) -> Vec<usize> {
    g.arcs
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| {
            let (a, b) = (a as usize, b as usize);
            mask >> a & 1 == 1 && mask >> b & 1 == 1 && (a == v || b == v)
        })
        .map(|(l, _)| l)
        .collect()
}

fn subgraph_connected(g: &LabelledDiagram, mask: u32) -> bool {
    let verts: Vec<usize> = (0..g.n_vertices()).filter(|v| mask >> v & 1 == 1).collect();
    let local = |v: usize| verts.iter().position(|&w| w == v);
    let edges: Vec<[usize; 2]> = g
        .arcs
        .iter()
        .filter_map(|&(a, b)| Some([local(a as usize)?, local(b as usize)?]))
        .collect();
    is_connected(verts.len(), &edges)
}

/// First applicable rule, in order: face at infinity; `Γ_B` disconnected;
/// for `#B ≥ 3` a vertex of `B` on exactly one edge of `Γ_B`; a vertex on
/// exactly two edges; `Γ_B` a single edge with `#B = 2`; `B = V`.
pub fn classify_face(g: &LabelledDiagram, face: &FaceDescriptor) -> Result<FaceClassification> {
    if face.n_points != g.n_vertices() {
        return Err(Error::MalformedInput(format!(
            "face on {} points for a diagram with {} vertices",
            face.n_points,
            g.n_vertices()
        )));
    }
    if !g.is_connected() {
        return Err(Error::InvariantViolation("diagram must be connected".into()));
    }
    if face.kind == FaceKind::Infinity {
        return Ok(FaceClassification::VanishesAtInfinity);
    }
    let mask = face.mask();
    if !subgraph_connected(g, mask) {
        return Ok(FaceClassification::VanishesDisconnected);
    }
    let members: Vec<usize> = face.set.iter().map(|l| l - 1).collect();
    let valence: Vec<usize> = members
        .iter()
        .map(|&v| inner_edges_at(g, mask, v).len())
        .collect();
    if members.len() >= 3 && valence.contains(&1) {
        return Ok(FaceClassification::VanishesUnivalent);
    }
    if let Some(i) = valence.iter().position(|&k| k == 2) {
        return Ok(FaceClassification::CancelsBySigma {
            vertex: members[i] + 1,
        });
    }
    if members.len() == 2 {
        let inner = inner_edges_at(g, mask, members[0]);
        if inner.len() == 1 {
            let (a, b) = g.arcs[inner[0]];
            return Ok(FaceClassification::IHXFamily {
                edge: inner[0] + 1,
                from: a as usize + 1,
                to: b as usize + 1,
            });
        }
    }
    if face.is_whole() {
        return Ok(FaceClassification::AnomalyFaceFV);
    }
    Err(Error::Unclassifiable(format!("{face}")))
}

/// Reverses the two edges of `Γ_B` at the distinguished vertex and exchanges
/// their labels.
pub fn sigma(face: &FaceDescriptor, g: &LabelledDiagram) -> Result<LabelledDiagram> {
    let FaceClassification::CancelsBySigma { vertex } = classify_face(g, face)? else {
        return Err(Error::NotApplicable(format!("{face} is not a sigma face")));
    };
    let inner = inner_edges_at(g, face.mask(), vertex - 1);
    let (i, j) = (inner[0], inner[1]);
    let rev = |(a, b): (u8, u8)| (b, a);
    let mut arcs = g.arcs.clone();
    arcs[i] = rev(g.arcs[j]);
    arcs[j] = rev(g.arcs[i]);
    LabelledDiagram::new(arcs)
}

/// Whether the two edges moved by `sigma` join the same pair of vertices.
pub fn sigma_edges_parallel(face: &FaceDescriptor, g: &LabelledDiagram) -> Result<bool> {
    let FaceClassification::CancelsBySigma { vertex } = classify_face(g, face)? else {
        return Err(Error::NotApplicable(format!("{face} is not a sigma face")));
    };
    let inner = inner_edges_at(g, face.mask(), vertex - 1);
    let ends = |l: usize| {
        let (a, b) = g.arcs[l];
        (a.min(b), a.max(b))
    };
    Ok(ends(inner[0]) == ends(inner[1]))
}

/// The six diagrams obtained by redistributing the four half-edges at the
/// ends of the single edge of `Γ_B`, two to each end; labels and
/// orientations are kept. Sorted; contains `g`.
pub fn ihx_family(g: &LabelledDiagram, face: &FaceDescriptor) -> Result<Vec<LabelledDiagram>> {
    let FaceClassification::IHXFamily { edge, from, to } = classify_face(g, face)? else {
        return Err(Error::NotApplicable(format!("{face} is not an IHX face")));
    };
    let (l, vj, vk) = (edge - 1, (from - 1) as u8, (to - 1) as u8);
    let mut loose = Vec::new();
    for (e, &(a, b)) in g.arcs.iter().enumerate() {
        if e == l {
            continue;
        }
        if a == vj || a == vk {
            loose.push((e, 0));
        }
        if b == vj || b == vk {
            loose.push((e, 1));
        }
    }
    debug_assert_eq!(loose.len(), 4);
    let mut out = Vec::with_capacity(6);
    for p in 0..4 {
        for q in p + 1..4 {
            let mut arcs = g.arcs.clone();
            for (k, &(e, end)) in loose.iter().enumerate() {
                let target = if k == p || k == q { vj } else { vk };
                if end == 0 {
                    arcs[e].0 = target;
                } else {
                    arcs[e].1 = target;
                }
            }
            out.push(LabelledDiagram::new(arcs)?);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_algebra::{class_of_labelled, reduce, AlgebraElement};
    use crate::diagram_core::labelled::enumerate_labelled;

    fn face(kind: FaceKind, set: &[usize], n: usize) -> FaceDescriptor {
        FaceDescriptor {
            kind,
            set: set.to_vec(),
            ambient: if kind == FaceKind::Anomaly { Ambient::SV } else { Ambient::CV },
            n_points: n,
        }
    }

    #[test]
    fn face_counts() {
        let two = enumerate_faces(2, Ambient::CV).unwrap();
        let names: Vec<String> = two.iter().map(|f| f.to_string()).collect();
        assert_eq!(names, ["F(∞;{1})", "F(∞;{2})", "F(∞;V)", "F(V)"]);
        assert_eq!(enumerate_faces(3, Ambient::CV).unwrap().len(), 11);
        let s3 = enumerate_faces(3, Ambient::SV).unwrap();
        assert_eq!(s3.len(), 3);
        assert!(s3.iter().all(|f| f.set.len() == 2));
        for k in 1..=6 {
            assert_eq!(enumerate_faces(k, Ambient::CV).unwrap().len(), face_count_formula(k, Ambient::CV));
            if k >= 2 {
                assert_eq!(enumerate_faces(k, Ambient::SV).unwrap().len(), face_count_formula(k, Ambient::SV));
            }
        }
        assert_eq!(enumerate_faces(0, Ambient::CV), Err(Error::EmptyV));
        assert_eq!(enumerate_faces(1, Ambient::SV), Err(Error::EmptyV));
    }

    #[test]
    fn induced_subgraphs() {
        let th = JacobiDiagram::theta();
        assert_eq!(induced_subgraph(&th, &[1, 2]).unwrap().edges.len(), 3);
        let k4 = JacobiDiagram::k4();
        for a in 1..=4 {
            for b in a + 1..=4 {
                let s = induced_subgraph(&k4, &[a, b]).unwrap();
                assert_eq!(s.edges.len(), 1);
                assert!(s.connected);
            }
        }
        let tt = JacobiDiagram::theta_theta();
        let comp = induced_subgraph(&tt, &[1, 2]).unwrap();
        assert_eq!(comp.edges.len(), 3);
        assert_eq!(induced_subgraph(&th, &[7]), Err(Error::UnknownVertex(7)));
    }

    #[test]
    fn theta_faces() {
        let g = LabelledDiagram::new(vec![(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(
            classify_face(&g, &face(FaceKind::Infinity, &[1, 2], 2)).unwrap(),
            FaceClassification::VanishesAtInfinity
        );
        assert_eq!(
            classify_face(&g, &face(FaceKind::Collapse, &[1, 2], 2)).unwrap(),
            FaceClassification::AnomalyFaceFV
        );
    }

    #[test]
    fn k4_pair_faces_are_ihx() {
        let k4 = LabelledDiagram::new(vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let f = face(FaceKind::Collapse, &[1, 2], 4);
        assert_eq!(
            classify_face(&k4, &f).unwrap(),
            FaceClassification::IHXFamily { edge: 1, from: 1, to: 2 }
        );
        let fam = ihx_family(&k4, &f).unwrap();
        assert_eq!(fam.len(), 6);
        assert!(fam.contains(&k4));
        let sum = fam
            .iter()
            .fold(AlgebraElement::zero(2), |acc, h| acc.add(&class_of_labelled(h)));
        assert!(reduce(&sum).is_zero());
        assert!(matches!(sigma(&f, &k4), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn sigma_swaps_and_reverses() {
        // Doubled square: 0=1 double, 2=3 double, rungs 0-2 and 1-3.
        let g = LabelledDiagram::new(vec![(0, 1), (1, 0), (2, 3), (3, 2), (0, 2), (1, 3)]).unwrap();
        let f = face(FaceKind::Collapse, &[1, 2, 3], 4);
        let c = classify_face(&g, &f).unwrap();
        assert_eq!(c, FaceClassification::VanishesUnivalent);
        let f = face(FaceKind::Collapse, &[1, 3], 4);
        let c = classify_face(&g, &f).unwrap();
        assert_eq!(c, FaceClassification::IHXFamily { edge: 5, from: 1, to: 3 });
        let k4 = LabelledDiagram::new(vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let f = face(FaceKind::Collapse, &[1, 2, 3], 4);
        assert_eq!(
            classify_face(&k4, &f).unwrap(),
            FaceClassification::CancelsBySigma { vertex: 1 }
        );
        let s = sigma(&f, &k4).unwrap();
        // edges at vertex 1 inside {1,2,3}: labels 1 and 2, i.e. (0,1), (0,2)
        assert_eq!(s.arcs[0], (2, 0));
        assert_eq!(s.arcs[1], (1, 0));
        assert_eq!(sigma(&f, &s).unwrap(), k4);
        assert_eq!(class_of_labelled(&s), class_of_labelled(&k4));
    }

    #[test]
    fn classification_is_total_at_low_degree() {
        for n in 1..=2 {
            let faces = enumerate_faces(2 * n, Ambient::CV).unwrap();
            for g in enumerate_labelled(n).unwrap().iter().step_by(11) {
                for f in &faces {
                    classify_face(g, f).unwrap();
                }
            }
        }
    }
}
