use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{sparse_from_map, Echelon, SparseRow, Q};
use super::oriented::{all_orientations, canonical_generator, has_odd_automorphism, Generator, OrientedDiagram};
use crate::config::Limits;
use crate::diagram_core::canon::CanonKey;
use crate::diagram_core::generate::generate_keys;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationKind {
    AS,
    IHX,
}

/// A formal relation: the sum of its terms, all with coefficient 1, is
/// zero. `None` stands for a reconnected term containing a loop, which is
/// zero in the quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub kind: RelationKind,
    pub terms: Vec<Option<OrientedDiagram>>,
}

impl Relation {
    pub fn as_row(d: &OrientedDiagram, v: usize) -> Self {
        Relation {
            kind: RelationKind::AS,
            terms: vec![Some(d.clone()), Some(d.reversed_at(v))],
        }
    }

    pub fn ihx_row(d: &OrientedDiagram, e: usize) -> Self {
        Relation {
            kind: RelationKind::IHX,
            terms: d.ihx_terms(e).into_iter().collect(),
        }
    }

    /// Sum of the canonical generators of the terms.
    pub fn generator_combination(&self) -> BTreeMap<Generator, Q> {
        let mut out = BTreeMap::new();
        for t in self.terms.iter().flatten() {
            *out.entry(canonical_generator(t)).or_insert_with(Q::zero) += Q::one();
        }
        out
    }
}

/// Every AS relation (each orientation, each vertex) and every IHX relation
/// (each orientation, each edge) on all degree-`n` graphs.
pub fn relation_set(n: usize) -> Result<Vec<Relation>> {
    relation_set_bounded(n, Limits::default().max_degree)
}

pub fn relation_set_bounded(n: usize, bound: usize) -> Result<Vec<Relation>> {
    let keys = generate_keys(n, false, bound)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let rows = keys
        .par_iter()
        .map(|key| {
            let mut rows = Vec::new();
            for d in all_orientations(key.nv, &key.edge_list()) {
                for v in 0..d.nv {
                    rows.push(Relation::as_row(&d, v));
                }
                for e in 0..d.edges.len() {
                    rows.push(Relation::ihx_row(&d, e));
                }
            }
            rows
        })
        .collect::<Vec<_>>();
    Ok(rows.into_iter().flatten().collect())
}

/// Generators of one graph: one per orientation parity, or one in total if
/// an automorphism reverses the orientation.
pub fn generators_for(key: &CanonKey) -> Vec<Generator> {
    if key.nv == 0 || has_odd_automorphism(key) {
        vec![Generator {
            key: key.clone(),
            parity: 0,
        }]
    } else {
        (0..2)
            .map(|parity| Generator {
                key: key.clone(),
                parity,
            })
            .collect()
    }
}

/// The degree-`n` quotient: the free space on the generators, in column
/// order, with the echelon form of the relation span.
///
/// Columns are ordered by decreasing parity, then decreasing key, so that
/// pivots are taken on reversed orientations and large keys first and the
/// surviving basis consists of small keys with their reference orientation.
#[derive(Debug)]
pub struct Quotient {
    pub degree: usize,
    pub generators: Vec<Generator>,
    index: HashMap<Generator, usize>,
    echelon: Echelon,
}

impl Quotient {
    fn build(n: usize) -> Self {
        let keys = generate_keys(n, false, n).expect("bound equals degree");
        let mut generators: Vec<Generator> = keys.iter().flat_map(generators_for).collect();
        generators.sort_by(|a, b| b.parity.cmp(&a.parity).then_with(|| b.key.cmp(&a.key)));
        let index: HashMap<Generator, usize> = generators
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        // One orientation per generator suffices together with AS, since
        // relations at other orientations differ from these by AS rows.
        let rows: Vec<SparseRow> = generators
            .par_iter()
            .flat_map_iter(|g| {
                let d = g.representative();
                let mut rels: Vec<Relation> = (0..d.nv).map(|v| Relation::as_row(&d, v)).collect();
                rels.extend((0..d.edges.len()).map(|e| Relation::ihx_row(&d, e)));
                rels.into_iter()
                    .map(|r| {
                        let map = r
                            .generator_combination()
                            .into_iter()
                            .map(|(g, q)| (index[&g], q))
                            .collect();
                        sparse_from_map(map)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        Quotient {
            degree: n,
            generators,
            index,
            echelon: Echelon::from_rows(rows),
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn dim(&self) -> usize {
        self.generators.len() - self.rank()
    }

    /// Generators surviving as a basis of the quotient.
    pub fn basis(&self) -> Vec<Generator> {
        (0..self.generators.len())
            .filter(|&c| !self.echelon.is_pivot(c))
            .map(|c| self.generators[c].clone())
            .collect()
    }

    pub fn column(&self, g: &Generator) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Normal form of a combination of degree-`n` generators.
    pub fn reduce(&self, terms: &BTreeMap<Generator, Q>) -> BTreeMap<Generator, Q> {
        let v: BTreeMap<usize, Q> = terms
            .iter()
            .map(|(g, q)| (self.index[g], q.clone()))
            .collect();
        self.echelon
            .reduce(&sparse_from_map(v))
            .into_iter()
            .map(|(c, q)| (self.generators[c].clone(), q))
            .collect()
    }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Quotient>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Quotient>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The degree-`n` quotient, built once per process. No bound check; callers
/// taking degrees from users go through [`quotient_bounded`].
pub(crate) fn quotient_unchecked(n: usize) -> Arc<Quotient> {
    if let Some(q) = cache().lock().expect("quotient cache").get(&n) {
        return q.clone();
    }
    // Built outside the lock so that nested degrees can be requested.
    let q = Arc::new(Quotient::build(n));
    cache()
        .lock()
        .expect("quotient cache")
        .entry(n)
        .or_insert(q)
        .clone()
}

pub fn quotient_bounded(n: usize, bound: usize) -> Result<Arc<Quotient>> {
    if n > bound {
        return Err(Error::DegreeTooLarge { degree: n, bound });
    }
    Ok(quotient_unchecked(n))
}

pub fn quotient(n: usize) -> Result<Arc<Quotient>> {
    quotient_bounded(n, Limits::default().max_degree)
}

/// Dimension of the degree-`n` part of the quotient algebra.
#[allow(non_snake_case)]
pub fn dim_A_n(n: usize) -> Result<usize> {
    Ok(quotient(n)?.dim())
}

pub fn dim_bounded(n: usize, bound: usize) -> Result<usize> {
    Ok(quotient_bounded(n, bound)?.dim())
}
