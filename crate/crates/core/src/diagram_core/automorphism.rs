use super::canon::vertex_automorphisms;
use super::diagram::JacobiDiagram;

/// Number of half-edge permutations preserving the vertex and edge
/// partitions. Each such permutation is a vertex automorphism together with
/// a bijection between the parallel edges of every vertex pair, and, since
/// there are no loops, the half-edge map is then forced.
pub fn count_automorphisms(g: &JacobiDiagram) -> u128 {
    let nv = g.n_vertices();
    let vertex_count = vertex_automorphisms(nv, &g.edges).len() as u128;
    let mut mult = std::collections::BTreeMap::new();
    for e in &g.edges {
        *mult.entry((e[0].min(e[1]), e[0].max(e[1]))).or_insert(0u32) += 1;
    }
    let parallel: u128 = mult.values().map(|&m| factorial(m as u64)).product();
    vertex_count * parallel
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_core::canon::tests::all_perms;

    /// Pairs (vertex bijection, edge bijection) inducing a partition-preserving
    /// half-edge permutation.
    fn brute_force(g: &JacobiDiagram) -> u128 {
        let nv = g.n_vertices();
        let ne = g.edges.len();
        let mut count = 0;
        for vp in all_perms(nv) {
            for ep in all_perms(ne) {
                let ok = g.edges.iter().enumerate().all(|(i, e)| {
                    let img = g.edges[ep[i]];
                    let (a, b) = (vp[e[0]], vp[e[1]]);
                    (a == img[0] && b == img[1]) || (a == img[1] && b == img[0])
                });
                if ok {
                    count += 1;
                }
            }
        }
        count
    }

    /// Direct search over all 720 permutations of the six theta half-edges.
    fn theta_half_edge_search() -> u128 {
        let g = JacobiDiagram::theta();
        let hs = g.half_edges();
        let mut count = 0;
        for p in all_perms(6) {
            let ok = (0..6).all(|a| {
                (0..6).all(|b| {
                    let (ha, hb) = (hs[a], hs[b]);
                    let (ia, ib) = (hs[p[a]], hs[p[b]]);
                    let same_v = g.vertex_of(ha) == g.vertex_of(hb);
                    let same_e = ha.edge == hb.edge;
                    (!same_v || g.vertex_of(ia) == g.vertex_of(ib)) && (!same_e || ia.edge == ib.edge)
                })
            });
            if ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn theta_has_twelve() {
        assert_eq!(count_automorphisms(&JacobiDiagram::theta()), 12);
        assert_eq!(theta_half_edge_search(), 12);
    }

    #[test]
    fn empty_has_one() {
        assert_eq!(count_automorphisms(&JacobiDiagram::empty()), 1);
    }

    #[test]
    fn degree_two_matches_brute_force() {
        for g in [
            JacobiDiagram::k4(),
            JacobiDiagram::doubled_square(),
            JacobiDiagram::theta_theta(),
            JacobiDiagram::theta(),
        ] {
            assert_eq!(count_automorphisms(&g), brute_force(&g));
        }
        assert_eq!(brute_force(&JacobiDiagram::k4()), 24);
        assert_eq!(brute_force(&JacobiDiagram::doubled_square()), 16);
        assert_eq!(brute_force(&JacobiDiagram::theta_theta()), 288);
    }
}
