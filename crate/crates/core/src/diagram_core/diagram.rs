use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One end of an edge: `end` is 0 for `edges[edge][0]` and 1 for `edges[edge][1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: usize,
    pub end: usize,
}

impl HalfEdge {
    pub fn new(edge: usize, end: usize) -> Self {
        HalfEdge { edge, end }
    }

    /// Dense index `2 * edge + end`.
    pub fn id(self) -> usize {
        2 * self.edge + self.end
    }

    pub fn from_id(id: usize) -> Self {
        HalfEdge { edge: id / 2, end: id % 2 }
    }

    pub fn other(self) -> Self {
        HalfEdge { edge: self.edge, end: 1 - self.end }
    }
}

/// A trivalent multigraph without simple loops, with optional decorations.
///
/// Vertices are addressed by index into `vertices`; `vertices` holds the
/// external ids used in JSON. Edge orientations are stored as ordered
/// `(origin, end)` vertex-index pairs, which is unambiguous because no edge
/// is a loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiDiagram {
    pub vertices: Vec<i64>,
    pub edges: Vec<[usize; 2]>,
    pub vertex_orientation: Option<Vec<[HalfEdge; 3]>>,
    pub edge_orientation: Option<Vec<[usize; 2]>>,
    pub vertex_labels: Option<Vec<usize>>,
    pub edge_labels: Option<Vec<usize>>,
}

impl JacobiDiagram {
    /// Undecorated diagram on vertices with ids `1..=nv`.
    pub fn from_edges(nv: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let g = JacobiDiagram {
            vertices: (1..=nv as i64).collect(),
            edges,
            vertex_orientation: None,
            edge_orientation: None,
            vertex_labels: None,
            edge_labels: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn empty() -> Self {
        JacobiDiagram {
            vertices: vec![],
            edges: vec![],
            vertex_orientation: None,
            edge_orientation: None,
            vertex_labels: None,
            edge_labels: None,
        }
    }

    pub fn theta() -> Self {
        Self::from_edges(2, vec![[0, 1], [0, 1], [0, 1]]).expect("theta is valid")
    }

    pub fn k4() -> Self {
        Self::from_edges(4, vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])
            .expect("K4 is valid")
    }

    /// Square with two opposite sides doubled.
    pub fn doubled_square() -> Self {
        Self::from_edges(4, vec![[0, 1], [0, 1], [2, 3], [2, 3], [0, 2], [1, 3]])
            .expect("doubled square is valid")
    }

    pub fn theta_theta() -> Self {
        Self::from_edges(4, vec![[0, 1], [0, 1], [0, 1], [2, 3], [2, 3], [2, 3]])
            .expect("two thetas are valid")
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self) -> usize {
        self.vertices.len() / 2
    }

    pub fn vertex_of(&self, h: HalfEdge) -> usize {
        self.edges[h.edge][h.end]
    }

    pub fn half_edges(&self) -> Vec<HalfEdge> {
        (0..self.edges.len())
            .flat_map(|e| [HalfEdge::new(e, 0), HalfEdge::new(e, 1)])
            .collect()
    }

    /// Half-edges at each vertex, in increasing half-edge order.
    pub fn incidence(&self) -> Vec<Vec<HalfEdge>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for h in self.half_edges() {
            inc[self.vertex_of(h)].push(h);
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.vertices.len(), &self.edges)
    }

    /// Checks trivalence, absence of loops and consistency of decorations.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if nv % 2 != 0 {
            return Err(Error::InvariantViolation(format!(
                "odd number of vertices ({nv})"
            )));
        }
        let mut deg = vec![0usize; nv];
        for (i, e) in self.edges.iter().enumerate() {
            if e[0] >= nv || e[1] >= nv {
                return Err(Error::InvariantViolation(format!(
                    "edge {i} references a missing vertex"
                )));
            }
            if e[0] == e[1] {
                return Err(Error::InvariantViolation(format!(
                    "edge {i} is a simple loop at vertex {}",
                    self.vertices[e[0]]
                )));
            }
            deg[e[0]] += 1;
            deg[e[1]] += 1;
        }
        if let Some(v) = deg.iter().position(|&d| d != 3) {
            return Err(Error::InvariantViolation(format!(
                "vertex {} has valence {}",
                self.vertices[v], deg[v]
            )));
        }
        debug_assert_eq!(2 * self.edges.len(), 3 * nv);
        if let Some(vo) = &self.vertex_orientation {
            if vo.len() != nv {
                return Err(Error::InvariantViolation(
                    "vertex orientation must list every vertex".into(),
                ));
            }
            let inc = self.incidence();
            for (v, triple) in vo.iter().enumerate() {
                let mut hs = triple.to_vec();
                hs.sort();
                if hs != inc[v] {
                    return Err(Error::InvariantViolation(format!(
                        "orientation at vertex {} is not a cyclic order of its half-edges",
                        self.vertices[v]
                    )));
                }
            }
        }
        if let Some(eo) = &self.edge_orientation {
            if eo.len() != self.edges.len() {
                return Err(Error::InvariantViolation(
                    "edge orientation must list every edge".into(),
                ));
            }
            for (i, (o, e)) in eo.iter().zip(&self.edges).enumerate() {
                let fwd = o[0] == e[0] && o[1] == e[1];
                let bwd = o[0] == e[1] && o[1] == e[0];
                if !fwd && !bwd {
                    return Err(Error::InvariantViolation(format!(
                        "orientation of edge {i} does not match its endpoints"
                    )));
                }
            }
        }
        if let Some(l) = &self.vertex_labels {
            check_bijection(l, nv, "vertex labels")?;
        }
        if let Some(l) = &self.edge_labels {
            check_bijection(l, self.edges.len(), "edge labels")?;
        }
        Ok(())
    }

    /// End index (0 or 1) that is the origin of edge `e`, if oriented.
    pub fn origin_end(&self, e: usize) -> Option<usize> {
        self.edge_orientation
            .as_ref()
            .map(|eo| if eo[e][0] == self.edges[e][0] { 0 } else { 1 })
    }
}

fn check_bijection(labels: &[usize], n: usize, what: &str) -> Result<()> {
    if labels.len() != n {
        return Err(Error::InvariantViolation(format!("{what} must be total")));
    }
    let mut seen = vec![false; n];
    for &l in labels {
        if l == 0 || l > n || seen[l - 1] {
            return Err(Error::InvariantViolation(format!(
                "{what} must be a bijection onto 1..={n}"
            )));
        }
        seen[l - 1] = true;
    }
    Ok(())
}

pub fn is_connected(nv: usize, edges: &[[usize; 2]]) -> bool {
    if nv == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); nv];
    for e in edges {
        adj[e[0]].push(e[1]);
        adj[e[1]].push(e[0]);
    }
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == nv
}

/// Interchange record. A half-edge is `[vertex id, edge index, end]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub degree: usize,
    pub vertices: Vec<i64>,
    pub edges: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_orientation: Option<Vec<[[i64; 3]; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_orientation: Option<Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_labels: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_labels: Option<BTreeMap<String, usize>>,
}

/// Parses and validates a JSON diagram record.
pub fn parse_diagram(text: &str) -> Result<JacobiDiagram> {
    let rec: DiagramJson =
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    JacobiDiagram::try_from(&rec)
}

impl TryFrom<&DiagramJson> for JacobiDiagram {
    type Error = Error;

    fn try_from(rec: &DiagramJson) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, &v) in rec.vertices.iter().enumerate() {
            if index.insert(v, i).is_some() {
                return Err(Error::MalformedInput(format!("duplicate vertex id {v}")));
            }
        }
        if rec.vertices.len() != 2 * rec.degree {
            return Err(Error::InvariantViolation(format!(
                "degree {} needs {} vertices, found {}",
                rec.degree,
                2 * rec.degree,
                rec.vertices.len()
            )));
        }
        let lookup = |v: i64| {
            index
                .get(&v)
                .copied()
                .ok_or_else(|| Error::MalformedInput(format!("edge uses unknown vertex {v}")))
        };
        let edges = rec
            .edges
            .iter()
            .map(|e| Ok([lookup(e[0])?, lookup(e[1])?]))
            .collect::<Result<Vec<_>>>()?;
        let vertex_orientation = match &rec.vertex_orientation {
            None => None,
            Some(vo) => Some(
                vo.iter()
                    .map(|triple| {
                        let mut out = [HalfEdge::new(0, 0); 3];
                        for (k, h) in triple.iter().enumerate() {
                            let (vid, e, end) = (h[0], h[1], h[2]);
                            if e < 0 || e as usize >= edges.len() || !(0..=1).contains(&end) {
                                return Err(Error::MalformedInput(format!(
                                    "bad half-edge {h:?}"
                                )));
                            }
                            let he = HalfEdge::new(e as usize, end as usize);
                            if edges[he.edge][he.end] != lookup(vid)? {
                                return Err(Error::MalformedInput(format!(
                                    "half-edge {h:?} does not sit at vertex {vid}"
                                )));
                            }
                            out[k] = he;
                        }
                        Ok(out)
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let edge_orientation = match &rec.edge_orientation {
            None => None,
            Some(eo) => Some(
                eo.iter()
                    .map(|p| Ok([lookup(p[0])?, lookup(p[1])?]))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let vertex_labels = match &rec.vertex_labels {
            None => None,
            Some(m) => {
                let mut out = vec![0; rec.vertices.len()];
                for (k, &l) in m {
                    let vid: i64 = k
                        .parse()
                        .map_err(|_| Error::MalformedInput(format!("bad vertex key {k}")))?;
                    out[lookup(vid)?] = l;
                }
                Some(out)
            }
        };
        let edge_labels = match &rec.edge_labels {
            None => None,
            Some(m) => {
                let mut out = vec![0; edges.len()];
                for (k, &l) in m {
                    let e: usize = k
                        .parse()
                        .map_err(|_| Error::MalformedInput(format!("bad edge key {k}")))?;
                    if e >= edges.len() {
                        return Err(Error::MalformedInput(format!("edge key {e} out of range")));
                    }
                    out[e] = l;
                }
                Some(out)
            }
        };
        let g = JacobiDiagram {
            vertices: rec.vertices.clone(),
            edges,
            vertex_orientation,
            edge_orientation,
            vertex_labels,
            edge_labels,
        };
        g.validate()?;
        Ok(g)
    }
}

impl From<&JacobiDiagram> for DiagramJson {
    fn from(g: &JacobiDiagram) -> Self {
        let id = |v: usize| g.vertices[v];
        DiagramJson {
            degree: g.degree(),
            vertices: g.vertices.clone(),
            edges: g.edges.iter().map(|e| [id(e[0]), id(e[1])]).collect(),
            vertex_orientation: g.vertex_orientation.as_ref().map(|vo| {
                vo.iter()
                    .map(|t| t.map(|h| [id(g.vertex_of(h)), h.edge as i64, h.end as i64]))
                    .collect()
            }),
            edge_orientation: g
                .edge_orientation
                .as_ref()
                .map(|eo| eo.iter().map(|p| [id(p[0]), id(p[1])]).collect()),
            vertex_labels: g.vertex_labels.as_ref().map(|l| {
                l.iter()
                    .enumerate()
                    .map(|(v, &lab)| (id(v).to_string(), lab))
                    .collect()
            }),
            edge_labels: g.edge_labels.as_ref().map(|l| {
                l.iter()
                    .enumerate()
                    .map(|(e, &lab)| (e.to_string(), lab))
                    .collect()
            }),
        }
    }
}

impl JacobiDiagram {
    pub fn to_json(&self) -> DiagramJson {
        DiagramJson::from(self)
    }
}
