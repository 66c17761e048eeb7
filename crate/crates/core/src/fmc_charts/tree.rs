use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Collapse at a point of `M ∖ ∞`.
    Finite,
    /// All points go to `∞`.
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberJson {
    pub set: Vec<usize>,
    pub b: usize,
    /// Witness point; filled in by the selection rule when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bprime: Option<usize>,
    #[serde(default)]
    pub degenerate: bool,
    /// Member of the chain `V(1) ⊃ V(2) ⊃ …` (infinity variant only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub special: bool,
}

/// Tree as read from or written to JSON. Labels are arbitrary distinct
/// integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NestedTree {
    #[serde(rename = "V")]
    pub v: Vec<usize>,
    pub members: Vec<MemberJson>,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// A validated tree. Points are positions `0..n` in the sorted label list;
/// `nodes[0]` is `V` and every mother precedes her daughters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub variant: Variant,
    pub labels: Vec<usize>,
    pub nodes: Vec<Node>,
    /// Node indices of `V(1), …, V(σ)`; empty in the finite variant.
    pub chain: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    /// Increasing positions.
    pub set: Vec<usize>,
    pub b: usize,
    pub bprime: Option<usize>,
    pub parent: Option<usize>,
    pub daughters: Vec<usize>,
    /// Positions of `A` not covered by a daughter.
    pub sons: Vec<usize>,
    pub degenerate: bool,
    pub special: bool,
    pub depth: usize,
}

/// The child of a node containing a given point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Child {
    Daughter(usize),
    Son(usize),
}

impl Node {
    pub fn contains(&self, p: usize) -> bool {
        self.set.binary_search(&p).is_ok()
    }
}

impl Tree {
    pub fn n_points(&self) -> usize {
        self.labels.len()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// `σ`, the length of the special chain.
    pub fn sigma(&self) -> usize {
        self.chain.len()
    }

    pub fn child_of(&self, node: usize, p: usize) -> Child {
        match self.nodes[node]
            .daughters
            .iter()
            .find(|&&d| self.nodes[d].contains(p))
        {
            Some(&d) => Child::Daughter(d),
            None => Child::Son(p),
        }
    }

    /// Index `i` (0-based) of the smallest chain member containing the node.
    pub fn level(&self, node: usize) -> usize {
        let set = &self.nodes[node].set;
        self.chain
            .iter()
            .rposition(|&c| set.iter().all(|&p| self.nodes[c].contains(p)))
            .expect("V contains every node")
    }

    pub fn is_degenerate(&self, node: usize) -> bool {
        self.nodes[node].degenerate
    }

    /// Indices of the degenerate nodes, `τ_d`.
    pub fn degenerate_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].degenerate).collect()
    }

    /// `#τ` in the finite variant, `σ + #τ_d` at infinity.
    pub fn codim(&self) -> usize {
        match self.variant {
            Variant::Finite => self.nodes.len(),
            Variant::Infinity => self.sigma() + self.degenerate_nodes().len(),
        }
    }

    pub fn to_json(&self) -> NestedTree {
        NestedTree {
            v: self.labels.clone(),
            members: self
                .nodes
                .iter()
                .map(|n| MemberJson {
                    set: n.set.iter().map(|&p| self.labels[p]).collect(),
                    b: self.labels[n.b],
                    bprime: n.bprime.map(|p| self.labels[p]),
                    degenerate: n.degenerate,
                    special: n.special,
                })
                .collect(),
            variant: self.variant,
        }
    }
}

/// First element of `A`, in label order, that is different from `b(A)` and
/// lies in a son or is the basepoint of a daughter not containing `b(A)`.
fn default_bprime(nodes: &[Node], i: usize) -> Option<usize> {
    let n = &nodes[i];
    n.set.iter().copied().find(|&p| bprime_eligible(nodes, i, p))
}

fn bprime_eligible(nodes: &[Node], i: usize, p: usize) -> bool {
    let n = &nodes[i];
    if p == n.b || !n.contains(p) {
        return false;
    }
    match n.daughters.iter().find(|&&d| nodes[d].contains(p)) {
        None => true,
        Some(&d) => nodes[d].b == p && !nodes[d].contains(n.b),
    }
}

/// Checks every invariant and lists the violations.
pub fn validate_tree(t: &NestedTree) -> Validation {
    let violations = match build(t) {
        Ok(_) => Vec::new(),
        Err(v) => v,
    };
    Validation {
        valid: violations.is_empty(),
        violations,
    }
}

impl NestedTree {
    pub fn build(&self) -> Result<Tree> {
        build(self).map_err(Error::InvalidTree)
    }
}

fn build(t: &NestedTree) -> std::result::Result<Tree, Vec<String>> {
    let mut errs = Vec::new();
    let mut labels = t.v.clone();
    labels.sort_unstable();
    labels.dedup();
    if labels.is_empty() {
        return Err(vec!["V is empty".into()]);
    }
    if labels.len() != t.v.len() {
        errs.push("V has repeated labels".into());
    }
    let pos = |l: usize| labels.binary_search(&l).ok();

    // Members as position sets.
    let mut raw: Vec<(Vec<usize>, &MemberJson)> = Vec::new();
    for m in &t.members {
        let mut set = Vec::new();
        for &l in &m.set {
            match pos(l) {
                Some(p) => set.push(p),
                None => errs.push(format!("member {:?} has label {l} outside V", m.set)),
            }
        }
        set.sort_unstable();
        let before = set.len();
        set.dedup();
        if set.len() != before {
            errs.push(format!("member {:?} repeats a label", m.set));
        }
        if set.is_empty() {
            errs.push("empty member".into());
            continue;
        }
        raw.push((set, m));
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    raw.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
    for w in raw.windows(2) {
        if w[0].0 == w[1].0 {
            errs.push(format!("member {:?} appears twice", w[0].1.set));
        }
    }
    let n = labels.len();
    if raw.first().map(|r| r.0.len()) != Some(n) {
        errs.push("V is not a member".into());
        return Err(errs);
    }
    let show = |s: &[usize]| -> Vec<usize> { s.iter().map(|&p| labels[p]).collect() };

    // Laminarity.
    for i in 0..raw.len() {
        for j in i + 1..raw.len() {
            let a: BTreeSet<usize> = raw[i].0.iter().copied().collect();
            let b: BTreeSet<usize> = raw[j].0.iter().copied().collect();
            let inter = a.intersection(&b).count();
            if inter != 0 && inter != b.len() && inter != a.len() {
                errs.push(format!(
                    "members {:?} and {:?} overlap without nesting",
                    show(&raw[i].0),
                    show(&raw[j].0)
                ));
            }
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(raw.len());
    for (i, (set, m)) in raw.iter().enumerate() {
        // Mother: the smallest earlier member containing this one.
        let parent = (0..i)
            .rev()
            .find(|&j| set.iter().all(|p| raw[j].0.binary_search(p).is_ok()));
        let b = match pos(m.b) {
            Some(p) if set.binary_search(&p).is_ok() => p,
            _ => {
                errs.push(format!("basepoint {} is not in member {:?}", m.b, m.set));
                set[0]
            }
        };
        let depth = parent.map_or(1, |p| nodes[p].depth + 1);
        nodes.push(Node {
            set: set.clone(),
            b,
            bprime: None,
            parent,
            daughters: Vec::new(),
            sons: Vec::new(),
            degenerate: m.degenerate,
            special: m.special,
            depth,
        });
        if let Some(p) = parent {
            nodes[p].daughters.push(i);
        }
    }
    for i in 0..nodes.len() {
        let covered: BTreeSet<usize> = nodes[i]
            .daughters
            .iter()
            .flat_map(|&d| nodes[d].set.iter().copied())
            .collect();
        nodes[i].sons = nodes[i].set.iter().copied().filter(|p| !covered.contains(p)).collect();
    }

    // Basepoint coherence.
    for i in 0..nodes.len() {
        for j in 0..nodes.len() {
            let (a, b) = (&nodes[i], &nodes[j]);
            if i != j && a.set.iter().all(|p| b.contains(*p)) && a.contains(b.b) && a.b != b.b {
                errs.push(format!(
                    "basepoint of {:?} must be {} since it lies in {:?}",
                    show(&a.set),
                    labels[b.b],
                    show(&b.set)
                ));
            }
        }
    }

    // Witness points.
    for (i, (_, m)) in raw.iter().enumerate() {
        if nodes[i].set.len() == 1 {
            if m.bprime.is_some() {
                errs.push(format!("singleton {:?} has no witness point", m.set));
            }
            continue;
        }
        match m.bprime {
            None => match default_bprime(&nodes, i) {
                Some(p) => nodes[i].bprime = Some(p),
                None => errs.push(format!("no eligible witness point in {:?}", m.set)),
            },
            Some(l) => match pos(l) {
                Some(p) if bprime_eligible(&nodes, i, p) => nodes[i].bprime = Some(p),
                _ => errs.push(format!(
                    "witness point {l} of {:?} is neither in a son nor the basepoint of a daughter avoiding b",
                    m.set
                )),
            },
        }
    }

    let mut chain = Vec::new();
    match t.variant {
        Variant::Finite => {
            for nd in &nodes {
                if nd.set.len() < 2 {
                    errs.push(format!("member {:?} has fewer than two points", show(&nd.set)));
                }
                if nd.degenerate || nd.special {
                    errs.push(format!(
                        "member {:?} carries an infinity-variant marking",
                        show(&nd.set)
                    ));
                }
            }
        }
        Variant::Infinity => {
            chain = (0..nodes.len()).filter(|&i| nodes[i].special).collect();
            if !nodes[0].special {
                errs.push("V must be special".into());
            }
            for w in chain.windows(2) {
                if nodes[w[1]].parent != Some(w[0]) {
                    errs.push(format!(
                        "special member {:?} is not a daughter of {:?}",
                        show(&nodes[w[1]].set),
                        show(&nodes[w[0]].set)
                    ));
                }
            }
            for (k, &c) in chain.iter().enumerate() {
                if k + 1 < chain.len() && nodes[c].degenerate {
                    errs.push(format!(
                        "special member {:?} other than the last is degenerate",
                        show(&nodes[c].set)
                    ));
                }
            }
            if let Some(&last) = chain.last() {
                for &c in &chain {
                    if nodes[c].b != nodes[last].b {
                        errs.push(format!(
                            "special member {:?} must have basepoint {}",
                            show(&nodes[c].set),
                            labels[nodes[last].b]
                        ));
                    }
                }
            }
            for nd in &nodes {
                if !nd.special && !nd.degenerate {
                    errs.push(format!(
                        "member {:?} is neither special nor degenerate",
                        show(&nd.set)
                    ));
                }
                if nd.degenerate && nd.set.len() < 2 {
                    errs.push(format!("degenerate member {:?} is a singleton", show(&nd.set)));
                }
                if nd.degenerate {
                    for &d in &nd.daughters {
                        if !nodes[d].degenerate || nodes[d].special {
                            errs.push(format!(
                                "daughter {:?} of a degenerate member must be degenerate and not special",
                                show(&nodes[d].set)
                            ));
                        }
                    }
                }
            }
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(Tree {
        variant: t.variant,
        labels,
        nodes,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(set: &[usize], b: usize) -> MemberJson {
        MemberJson {
            set: set.to_vec(),
            b,
            bprime: None,
            degenerate: false,
            special: false,
        }
    }

    fn finite(v: &[usize], members: Vec<MemberJson>) -> NestedTree {
        NestedTree {
            v: v.to_vec(),
            members,
            variant: Variant::Finite,
        }
    }

    #[test]
    fn root_only_is_valid() {
        let t = finite(&[1, 2, 3], vec![member(&[1, 2, 3], 1)]);
        assert!(validate_tree(&t).valid);
        let tree = t.build().unwrap();
        assert_eq!(tree.codim(), 1);
        assert_eq!(tree.nodes[0].bprime, Some(1));
    }

    #[test]
    fn overlapping_members_are_rejected() {
        let t = finite(
            &[1, 2, 3],
            vec![member(&[1, 2, 3], 1), member(&[1, 2], 1), member(&[2, 3], 2)],
        );
        let v = validate_tree(&t);
        assert!(!v.valid);
        assert!(v.violations[0].contains("overlap"));
    }

    #[test]
    fn coherent_basepoints() {
        let t = finite(&[1, 2, 3, 4], vec![member(&[1, 2, 3, 4], 1), member(&[1, 2], 1)]);
        let tree = t.build().unwrap();
        assert_eq!(tree.codim(), 2);
        // b'(V) skips the daughter containing b(V).
        assert_eq!(tree.labels[tree.nodes[0].bprime.unwrap()], 3);
        let bad = finite(&[1, 2, 3, 4], vec![member(&[1, 2, 3, 4], 1), member(&[1, 2], 2)]);
        assert!(!validate_tree(&bad).valid);
    }

    #[test]
    fn witness_point_rules() {
        let mut m = member(&[1, 2, 3, 4], 1);
        m.bprime = Some(4);
        let mut d = member(&[3, 4], 3);
        d.bprime = Some(4);
        let t = finite(&[1, 2, 3, 4], vec![m.clone(), d.clone()]);
        assert!(!validate_tree(&t).valid, "4 is inside a daughter but not its basepoint");
        m.bprime = Some(3);
        assert!(validate_tree(&finite(&[1, 2, 3, 4], vec![m, d])).valid);
    }

    #[test]
    fn infinity_markings() {
        let mut v = member(&[1, 2, 3], 1);
        v.special = true;
        let mut s = member(&[1], 1);
        s.special = true;
        let t = NestedTree {
            v: vec![1, 2, 3],
            members: vec![v.clone(), s.clone()],
            variant: Variant::Infinity,
        };
        let tree = t.build().unwrap();
        assert_eq!(tree.sigma(), 2);
        assert_eq!(tree.codim(), 2);
        assert_eq!(tree.level(1), 1);
        // A non-special, non-degenerate member is not allowed.
        let mut d = member(&[2, 3], 2);
        let t2 = NestedTree {
            v: vec![1, 2, 3],
            members: vec![v.clone(), d.clone()],
            variant: Variant::Infinity,
        };
        assert!(!validate_tree(&t2).valid);
        d.degenerate = true;
        let t3 = NestedTree {
            v: vec![1, 2, 3],
            members: vec![v, d],
            variant: Variant::Infinity,
        };
        assert_eq!(t3.build().unwrap().codim(), 2);
    }

    #[test]
    fn json_round_trip() {
        let t = finite(&[1, 2, 3, 4], vec![member(&[1, 2, 3, 4], 1), member(&[1, 2], 1)]);
        let tree = t.build().unwrap();
        let s = serde_json::to_string(&tree.to_json()).unwrap();
        assert!(s.contains("\"V\""));
        let back: NestedTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back.build().unwrap(), tree);
    }
}
