use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::faces::{
    classify_face, enumerate_faces, ihx_family, sigma, sigma_edges_parallel, Ambient,
    FaceClassification, FaceDescriptor,
};
use crate::diagram_algebra::{class_of_labelled, reduce, AlgebraElement};
use crate::diagram_core::labelled::{enumerate_labelled_bounded, LabelledDiagram};
use crate::error::{Error, Result};

/// Census of the boundary faces over all of `ℰ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationReport {
    pub degree: usize,
    pub labelled_diagrams: usize,
    pub faces_per_diagram: usize,
    pub faces_total: usize,
    pub by_class: BTreeMap<String, usize>,
    /// Groups of six IHX faces, each verified to have six members, zero
    /// class sum and to be closed under taking the family again.
    pub ihx_groups: usize,
    /// Unordered pairs `{Γ, σ(Γ)}` of distinct diagrams, verified involutive
    /// and class-preserving.
    pub sigma_pairs: usize,
    /// Faces with `σ(Γ) = Γ`; their contribution equals its own negative.
    pub sigma_fixed_points: usize,
    /// Sigma faces whose two moved edges are parallel.
    pub parallel_edge_sigma_faces: usize,
    /// Face names carrying a contribution not cancelled by the lemmas.
    pub survivors: Vec<String>,
    /// Codimension-one faces of `S_V` per diagram.
    pub s_v_faces_per_diagram: usize,
    /// Failures of any check; empty when the cancellation holds.
    pub gaps: Vec<String>,
}

impl CancellationReport {
    pub fn is_ok(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Runs every face of every diagram in `ℰ_n` through the classification and
/// verifies the cancellations. Gaps are recorded in the report.
pub fn cancellation_report(n: usize, labelled_bound: usize) -> Result<CancellationReport> {
    let all = enumerate_labelled_bounded(n, labelled_bound)?;
    let nv = 2 * n;
    let faces = enumerate_faces(nv, Ambient::CV)?;
    let s_faces = if nv >= 2 {
        enumerate_faces(nv, Ambient::SV)?.len()
    } else {
        0
    };
    let index: HashMap<&LabelledDiagram, usize> = all.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let classes: Vec<AlgebraElement> = all.par_iter().map(class_of_labelled).collect();
    let class_of = |g: &LabelledDiagram| match index.get(g) {
        Some(&i) => classes[i].clone(),
        None => class_of_labelled(g),
    };

    let per_diagram: Vec<Result<Vec<FaceClassification>>> = all
        .par_iter()
        .map(|g| faces.iter().map(|f| classify_face(g, f)).collect())
        .collect();

    let mut gaps = Vec::new();
    let mut by_class: BTreeMap<String, usize> = BTreeMap::new();
    let mut survivors = BTreeSet::new();
    let mut sigma_faces = Vec::new();
    let mut ihx_faces = Vec::new();
    for (gi, res) in per_diagram.into_iter().enumerate() {
        let cls = match res {
            Ok(c) => c,
            Err(e) => {
                gaps.push(format!("diagram {gi}: {e}"));
                continue;
            }
        };
        for (f, c) in faces.iter().zip(cls) {
            *by_class.entry(c.name().to_string()).or_default() += 1;
            match c {
                FaceClassification::CancelsBySigma { .. } => sigma_faces.push((gi, f)),
                FaceClassification::IHXFamily { .. } => ihx_faces.push((gi, f)),
                FaceClassification::AnomalyFaceFV => {
                    survivors.insert(f.to_string());
                }
                _ => {}
            }
        }
    }

    // Sigma faces.
    let sigma_results: Vec<std::result::Result<(bool, bool), String>> = sigma_faces
        .par_iter()
        .map(|&(gi, f)| check_sigma(&all[gi], f, &index, &class_of))
        .collect();
    let mut sigma_pairs2 = 0;
    let mut fixed = 0;
    let mut parallel = 0;
    for r in sigma_results {
        match r {
            Ok((is_fixed, is_parallel)) => {
                if is_fixed {
                    fixed += 1;
                } else {
                    sigma_pairs2 += 1;
                }
                if is_parallel {
                    parallel += 1;
                }
            }
            Err(e) => gaps.push(e),
        }
    }

    // IHX faces, processed once per group from its smallest member.
    let ihx_results: Vec<std::result::Result<bool, String>> = ihx_faces
        .par_iter()
        .map(|&(gi, f)| check_ihx(&all[gi], f, &index, &class_of))
        .collect();
    let mut groups = 0;
    for r in ihx_results {
        match r {
            Ok(true) => groups += 1,
            Ok(false) => {}
            Err(e) => gaps.push(e),
        }
    }
    if 6 * groups != ihx_faces.len() {
        gaps.push(format!(
            "{} IHX faces do not split into groups of six ({groups} groups)",
            ihx_faces.len()
        ));
    }
    if sigma_pairs2 % 2 != 0 {
        gaps.push("sigma faces do not pair off".into());
    }
    for s in &survivors {
        if s != "F(V)" {
            gaps.push(format!("face {s} survives"));
        }
    }
    gaps.sort();

    Ok(CancellationReport {
        degree: n,
        labelled_diagrams: all.len(),
        faces_per_diagram: faces.len(),
        faces_total: faces.len() * all.len(),
        by_class,
        ihx_groups: groups,
        sigma_pairs: sigma_pairs2 / 2,
        sigma_fixed_points: fixed,
        parallel_edge_sigma_faces: parallel,
        survivors: survivors.into_iter().collect(),
        s_v_faces_per_diagram: s_faces,
        gaps,
    })
}

fn same_multigraph(a: &LabelledDiagram, b: &LabelledDiagram) -> bool {
    let sorted = |g: &LabelledDiagram| {
        let mut e: Vec<(u8, u8)> = g.arcs.iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
        e.sort();
        e
    };
    sorted(a) == sorted(b)
}

/// Returns `(fixed point, moved edges parallel)` or a description of the
/// failed check.
fn check_sigma(
    g: &LabelledDiagram,
    f: &FaceDescriptor,
    index: &HashMap<&LabelledDiagram, usize>,
    class_of: &(dyn Fn(&LabelledDiagram) -> AlgebraElement + Sync),
) -> std::result::Result<(bool, bool), String> {
    let fail = |what: &str| format!("sigma check failed at {f} of {:?}: {what}", g.arcs);
    let h = sigma(f, g).map_err(|e| fail(&e.to_string()))?;
    if !index.contains_key(&h) {
        return Err(fail("image is not in the labelled set"));
    }
    if !same_multigraph(g, &h) {
        return Err(fail("image changes the underlying multigraph"));
    }
    if classify_face(&h, f).map_err(|e| fail(&e.to_string()))? != classify_face(g, f).unwrap() {
        return Err(fail("image has a different classification"));
    }
    if sigma(f, &h).map_err(|e| fail(&e.to_string()))? != *g {
        return Err(fail("not an involution"));
    }
    if class_of(&h) != class_of(g) {
        return Err(fail("classes differ"));
    }
    let parallel = sigma_edges_parallel(f, g).map_err(|e| fail(&e.to_string()))?;
    Ok((h == *g, parallel))
}

/// Returns whether `g` is the smallest member of its family (so the group
/// is counted once) or a description of the failed check.
fn check_ihx(
    g: &LabelledDiagram,
    f: &FaceDescriptor,
    index: &HashMap<&LabelledDiagram, usize>,
    class_of: &(dyn Fn(&LabelledDiagram) -> AlgebraElement + Sync),
) -> std::result::Result<bool, String> {
    let fail = |what: &str| format!("IHX check failed at {f} of {:?}: {what}", g.arcs);
    let fam = ihx_family(g, f).map_err(|e| fail(&e.to_string()))?;
    let distinct: BTreeSet<&LabelledDiagram> = fam.iter().collect();
    if fam.len() != 6 || distinct.len() != 6 || !fam.contains(g) {
        return Err(fail("family does not have six distinct members containing the diagram"));
    }
    if fam[0] != *g {
        return Ok(false);
    }
    let mut sum = AlgebraElement::zero(class_of(g).bound());
    for h in &fam {
        if !index.contains_key(h) {
            return Err(fail("member is not in the labelled set"));
        }
        if ihx_family(h, f).map_err(|e| fail(&e.to_string()))? != fam {
            return Err(fail("family is not closed"));
        }
        sum = sum.add(&class_of(h));
    }
    if !reduce(&sum).is_zero() {
        return Err(fail(&format!("class sum is {sum}")));
    }
    Ok(true)
}

/// Same census, failing with `CancellationGap` if any check fails.
pub fn boundary_cancellation_check(n: usize) -> Result<CancellationReport> {
    if !(1..=2).contains(&n) {
        return Err(Error::DegreeTooLarge { degree: n, bound: 2 });
    }
    let r = cancellation_report(n, 2)?;
    match r.gaps.first() {
        Some(g) => Err(Error::CancellationGap(g.clone())),
        None => Ok(r),
    }
}
