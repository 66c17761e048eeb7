use super::diagram::JacobiDiagram;
use super::labelled::{LabelledDiagram, LabelledHalfEdge};
use crate::error::{Error, Result};

/// Cyclic order of the three half-edges at each vertex, indexed by vertex.
pub type VertexOrientation = Vec<[LabelledHalfEdge; 3]>;

/// Sign of a permutation given as `perm[i] = image of i`.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Parity of the permutation carrying the edge listing of the half-edges
/// (edges by label, origin then end) to the vertex listing (vertices by
/// label, half-edges in cyclic order).
pub fn orientation_sign(g: &LabelledDiagram, vo: &VertexOrientation) -> Result<i8> {
    let nv = g.n_vertices();
    if vo.len() != nv {
        return Err(Error::MissingOrientation(format!(
            "expected {nv} vertex orientations, found {}",
            vo.len()
        )));
    }
    let inc = g.incidence();
    let mut listing = Vec::with_capacity(3 * nv);
    for (v, triple) in vo.iter().enumerate() {
        let mut sorted = triple.to_vec();
        sorted.sort();
        if sorted != inc[v] {
            return Err(Error::InvariantViolation(format!(
                "orientation at vertex {} does not list its half-edges",
                v + 1
            )));
        }
        listing.extend(triple.iter().map(|&(e, end)| 2 * e + end));
    }
    Ok(permutation_sign(&listing))
}

/// Same sign for a decorated diagram carrying labels and both orientations.
pub fn orientation_sign_diagram(g: &JacobiDiagram) -> Result<i8> {
    let lg = LabelledDiagram::from_diagram(g)?;
    let vo = g
        .vertex_orientation
        .as_ref()
        .ok_or_else(|| Error::MissingOrientation("vertex orientation".into()))?;
    let vl = g.vertex_labels.as_ref().expect("checked by from_diagram");
    let el = g.edge_labels.as_ref().expect("checked by from_diagram");
    let mut out = vec![[(0, 0); 3]; g.n_vertices()];
    for (v, triple) in vo.iter().enumerate() {
        out[vl[v] - 1] = triple.map(|h| {
            let origin = g.origin_end(h.edge).expect("checked by from_diagram");
            (el[h.edge] - 1, usize::from(h.end != origin))
        });
    }
    orientation_sign(&lg, &out)
}

/// Vertex orientation listing each vertex's half-edges in increasing order.
pub fn sorted_orientation(g: &LabelledDiagram) -> VertexOrientation {
    g.incidence()
        .into_iter()
        .map(|hs| [hs[0], hs[1], hs[2]])
        .collect()
}

/// A vertex orientation whose sign is +1.
pub fn canonical_vertex_orientation(g: &LabelledDiagram) -> VertexOrientation {
    let mut vo = sorted_orientation(g);
    if orientation_sign(g, &vo).expect("sorted orientation is well formed") < 0 {
        vo[0].swap(1, 2);
    }
    vo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_core::canon::tests::all_perms;

    fn theta_forward() -> LabelledDiagram {
        LabelledDiagram::new(vec![(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn pictured_theta_is_positive() {
        // a,b,c are the origins of edges 1,2,3 and A,B,C their ends.
        let g = theta_forward();
        let vo = vec![[(0, 0), (1, 0), (2, 0)], [(1, 1), (0, 1), (2, 1)]];
        assert_eq!(orientation_sign(&g, &vo).unwrap(), 1);
    }

    #[test]
    fn reversing_one_vertex_flips() {
        let g = theta_forward();
        let vo = vec![[(0, 0), (1, 0), (2, 0)], [(1, 1), (0, 1), (2, 1)]];
        let mut flipped = vo.clone();
        flipped[1].swap(0, 1);
        assert_eq!(orientation_sign(&g, &flipped).unwrap(), -1);
        let mut rotated = vo.clone();
        rotated[0].rotate_left(1);
        assert_eq!(orientation_sign(&g, &rotated).unwrap(), 1);
    }

    /// Relabelling edges moves half-edges in pairs, an even permutation.
    #[test]
    fn edge_relabelling_keeps_sign_on_all_of_degree_one() {
        for g in crate::diagram_core::labelled::enumerate_labelled(1).unwrap() {
            let vo = sorted_orientation(&g);
            let s = orientation_sign(&g, &vo).unwrap();
            for p in all_perms(3) {
                let mut arcs = vec![(0, 0); 3];
                for (old, &new) in p.iter().enumerate() {
                    arcs[new] = g.arcs[old];
                }
                let h = LabelledDiagram::new(arcs).unwrap();
                let vo_h: VertexOrientation = vo
                    .iter()
                    .map(|t| t.map(|(e, end)| (p[e], end)))
                    .collect();
                let s_h = orientation_sign(&h, &vo_h).unwrap();
                assert_eq!(s_h, s);
            }
        }
    }

    #[test]
    fn relabelling_inside_the_vertex_listing_only() {
        let g = theta_forward();
        let vo = vec![[(0, 0), (1, 0), (2, 0)], [(1, 1), (0, 1), (2, 1)]];
        let swapped: VertexOrientation = vo
            .iter()
            .map(|t| t.map(|(e, end)| (if e == 0 { 1 } else if e == 1 { 0 } else { e }, end)))
            .collect();
        let s = orientation_sign(&g, &vo).unwrap();
        let s2 = orientation_sign(&g, &swapped).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn canonical_orientation_is_positive() {
        for g in crate::diagram_core::labelled::enumerate_labelled(1).unwrap() {
            assert_eq!(orientation_sign(&g, &canonical_vertex_orientation(&g)).unwrap(), 1);
        }
    }

    #[test]
    fn diagram_wrapper_requires_orientation() {
        let d = theta_forward().to_diagram();
        assert!(matches!(
            orientation_sign_diagram(&d),
            Err(Error::MissingOrientation(_))
        ));
    }
}
