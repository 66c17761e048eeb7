//! Dense brute-force dimension of the quotient in low degree.
//!
//! Oriented diagrams on labelled vertices are enumerated directly, merged
//! into isomorphism classes by trying every vertex permutation and every
//! ordering of parallel edges, and the relations are written as a dense
//! matrix over the classes.

use std::collections::HashMap;

use confint_core::diagram_algebra::{canonical_generator, OrientedDiagram};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

type Key = (Vec<[usize; 2]>, Vec<[usize; 3]>);

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn rotate_min(t: [usize; 3]) -> [usize; 3] {
    let r = (0..3).min_by_key(|&i| t[i]).unwrap();
    [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
}

/// All normal forms of a raw diagram: edges sorted as `(min, max)` pairs,
/// one variant per ordering of each group of parallel edges.
fn normal_forms(edges: &[[usize; 2]], rot: &[[usize; 3]]) -> Vec<Key> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    let norm = |e: [usize; 2]| [e[0].min(e[1]), e[0].max(e[1])];
    order.sort_by_key(|&i| norm(edges[i]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if norm(edges[g[0]]) == norm(edges[i]) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut variants: Vec<Vec<usize>> = vec![vec![]];
    for g in &groups {
        let mut next = Vec::new();
        for v in &variants {
            for p in permutations(g) {
                let mut w = v.clone();
                w.extend(p);
                next.push(w);
            }
        }
        variants = next;
    }
    variants
        .into_iter()
        .map(|ord| {
            let mut new_index = vec![0; edges.len()];
            for (j, &i) in ord.iter().enumerate() {
                new_index[i] = j;
            }
            let new_edges: Vec<[usize; 2]> = ord.iter().map(|&i| norm(edges[i])).collect();
            let remap = |h: usize| {
                let (i, end) = (h / 2, h % 2);
                let vertex = edges[i][end];
                let j = new_index[i];
                2 * j + usize::from(vertex != new_edges[j][0])
            };
            let new_rot = rot.iter().map(|t| rotate_min(t.map(remap))).collect();
            (new_edges, new_rot)
        })
        .collect()
}

fn trivalent_multisets(nv: usize) -> Vec<Vec<[usize; 2]>> {
    let pairs: Vec<[usize; 2]> = (0..nv)
        .flat_map(|a| (a + 1..nv).map(move |b| [a, b]))
        .collect();
    let mut out = Vec::new();
    fn rec(pairs: &[[usize; 2]], start: usize, left: usize, pick: &mut Vec<[usize; 2]>, deg: &mut Vec<usize>, out: &mut Vec<Vec<[usize; 2]>>) {
        if left == 0 {
            if deg.iter().all(|&d| d == 3) {
                out.push(pick.clone());
            }
            return;
        }
        for i in start..pairs.len() {
            let [a, b] = pairs[i];
            if deg[a] == 3 || deg[b] == 3 {
                continue;
            }
            deg[a] += 1;
            deg[b] += 1;
            pick.push(pairs[i]);
            rec(pairs, i, left - 1, pick, deg, out);
            pick.pop();
            deg[a] -= 1;
            deg[b] -= 1;
        }
    }
    rec(&pairs, 0, 3 * nv / 2, &mut vec![], &mut vec![0; nv], &mut out);
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// IHX reconnections at edge `i`; `None` when a loop appears.
fn ihx(edges: &[[usize; 2]], rot: &[[usize; 3]], i: usize) -> Vec<Option<Key>> {
    let (u, v) = (edges[i][0], edges[i][1]);
    let start = |t: [usize; 3], h: usize| {
        let r = t.iter().position(|&x| x == h).unwrap();
        [t[(r + 1) % 3], t[(r + 2) % 3]]
    };
    let [a, b] = start(rot[u], 2 * i);
    let [c, d] = start(rot[v], 2 * i + 1);
    let mut out = vec![Some(normal_forms(edges, rot).remove(0))];
    for (ou, ov, mv_u, mv_v) in [([2 * i, a, c], [2 * i + 1, d, b], c, b), ([2 * i, a, d], [2 * i + 1, b, c], d, b)] {
        let mut e2 = edges.to_vec();
        let mut r2 = rot.to_vec();
        e2[mv_u / 2][mv_u % 2] = u;
        e2[mv_v / 2][mv_v % 2] = v;
        r2[u] = ou;
        r2[v] = ov;
        if e2.iter().any(|p| p[0] == p[1]) {
            out.push(None);
        } else {
            out.push(Some(normal_forms(&e2, &r2).remove(0)));
        }
    }
    out
}

fn dense_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for k in 0..cols {
                    let t = &m[rank][k] * &f;
                    m[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn oracle_dim(n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    let nv = 2 * n;
    let mut objects: Vec<Key> = Vec::new();
    for edges in trivalent_multisets(nv) {
        let mut inc = vec![Vec::new(); nv];
        for (i, e) in edges.iter().enumerate() {
            inc[e[0]].push(2 * i);
            inc[e[1]].push(2 * i + 1);
        }
        for mask in 0..1usize << nv {
            let rot: Vec<[usize; 3]> = (0..nv)
                .map(|v| {
                    let h = &inc[v];
                    if mask >> v & 1 == 0 {
                        rotate_min([h[0], h[1], h[2]])
                    } else {
                        rotate_min([h[0], h[2], h[1]])
                    }
                })
                .collect();
            objects.extend(normal_forms(&edges, &rot));
        }
    }
    objects.sort();
    objects.dedup();
    let index: HashMap<Key, usize> = objects.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut uf = UnionFind((0..objects.len()).collect());
    let perms = permutations(&(0..nv).collect::<Vec<_>>());
    for (i, (edges, rot)) in objects.iter().enumerate() {
        for p in &perms {
            let e2: Vec<[usize; 2]> = edges.iter().map(|e| [p[e[0]], p[e[1]]]).collect();
            let mut r2 = vec![[0; 3]; nv];
            for v in 0..nv {
                r2[p[v]] = rot[v];
            }
            for k in normal_forms(&e2, &r2) {
                uf.union(i, index[&k]);
            }
        }
    }
    let mut class_of = HashMap::new();
    for i in 0..objects.len() {
        let r = uf.find(i);
        let next = class_of.len();
        class_of.entry(r).or_insert(next);
    }
    let ncls = class_of.len();

    // Same class implies same library generator.
    let mut gen_of_class = HashMap::new();
    for (i, (edges, rot)) in objects.iter().enumerate() {
        let d = OrientedDiagram {
            nv,
            edges: edges.clone(),
            orientation: rot.clone(),
        };
        let g = canonical_generator(&d);
        let c = class_of[&uf.find(i)];
        assert_eq!(gen_of_class.entry(c).or_insert_with(|| g.clone()), &g);
    }

    let mut rows = Vec::new();
    let one = BigRational::from_integer(BigInt::from(1));
    for (i, (edges, rot)) in objects.iter().enumerate() {
        for v in 0..nv {
            let mut row = vec![BigRational::zero(); ncls];
            row[class_of[&uf.find(i)]] += &one;
            let mut flipped = rot.clone();
            flipped[v].swap(1, 2);
            let k = normal_forms(edges, &flipped).remove(0);
            row[class_of[&uf.find(index[&k])]] += &one;
            rows.push(row);
        }
        for e in 0..edges.len() {
            let mut row = vec![BigRational::zero(); ncls];
            for k in ihx(edges, rot, e).into_iter().flatten() {
                row[class_of[&uf.find(index[&k])]] += &one;
            }
            rows.push(row);
        }
    }
    ncls - dense_rank(rows)
}
