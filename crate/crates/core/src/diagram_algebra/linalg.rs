//! Sparse exact row echelon form over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

/// Sparse vector: `(column, coefficient)` pairs, columns increasing,
/// coefficients nonzero.
pub type SparseRow = Vec<(usize, Q)>;

pub fn sparse_from_map(map: BTreeMap<usize, Q>) -> SparseRow {
    map.into_iter().filter(|(_, q)| !q.is_zero()).collect()
}

/// `a + k b`.
pub fn add_scaled(a: &[(usize, Q)], b: &[(usize, Q)], k: &Q) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|x| x.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|x| x.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, &b[j].1 * k));
            j += 1;
        } else {
            let q = &a[i].1 + &b[j].1 * k;
            if !q.is_zero() {
                out.push((ca, q));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Fully reduced row echelon form. Each row has leading coefficient 1 at
/// its pivot, and no row has a nonzero entry in another row's pivot column.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<SparseRow>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows<I: IntoIterator<Item = SparseRow>>(rows: I) -> Self {
        let mut e = Self::new();
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.pivot_row.keys().copied().collect();
        p.sort();
        p
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Adds a row to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut r = self.reduce(&row);
        let Some((pivot, lead)) = r.first().cloned() else {
            return false;
        };
        let inv = Q::one() / lead;
        for x in r.iter_mut() {
            x.1 = &x.1 * &inv;
        }
        for other in self.rows.iter_mut() {
            if let Ok(pos) = other.binary_search_by_key(&pivot, |x| x.0) {
                let k = -other[pos].1.clone();
                *other = add_scaled(other, &r, &k);
            }
        }
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(r);
        true
    }

    /// Normal form of `v` modulo the row span: the unique representative
    /// with zero entries in every pivot column.
    pub fn reduce(&self, v: &[(usize, Q)]) -> SparseRow {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, q) in v {
            match self.pivot_row.get(c) {
                None => {
                    *acc.entry(*c).or_insert_with(Q::zero) += q;
                }
                Some(&ri) => {
                    for (c2, q2) in &self.rows[ri] {
                        if c2 != c {
                            *acc.entry(*c2).or_insert_with(Q::zero) -= q * q2;
                        }
                    }
                }
            }
        }
        sparse_from_map(acc)
    }
}
