use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::Q;
use super::oriented::{canonical_generator, Generator, OrientedDiagram};
use super::relations::quotient_unchecked;
use crate::config::DEFAULT_SERIES_BOUND;
use crate::diagram_core::diagram::{DiagramJson, JacobiDiagram};
use crate::diagram_core::labelled::LabelledDiagram;
use crate::diagram_core::orientation::{
    canonical_vertex_orientation, orientation_sign, VertexOrientation,
};
use crate::error::{Error, Result};

/// Element of the quotient algebra truncated above degree `bound`.
///
/// Terms produced by the algebra operations are in normal form; an element
/// built with [`AlgebraElement::unreduced`] is not until passed to
/// [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    bound: usize,
    terms: BTreeMap<Generator, Q>,
}

pub fn rational(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

impl AlgebraElement {
    pub fn zero(bound: usize) -> Self {
        AlgebraElement {
            bound,
            terms: BTreeMap::new(),
        }
    }

    /// `1[∅]`.
    pub fn one(bound: usize) -> Self {
        Self::from_generator(bound, Generator::empty())
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn terms(&self) -> &BTreeMap<Generator, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Raw combination; terms above the bound are dropped, nothing is
    /// reduced.
    pub fn unreduced(bound: usize, terms: impl IntoIterator<Item = (Generator, Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (g, q) in terms {
            if g.degree() <= bound {
                *map.entry(g).or_insert_with(Q::zero) += q;
            }
        }
        map.retain(|_, q: &mut Q| !q.is_zero());
        AlgebraElement { bound, terms: map }
    }

    pub fn from_generator(bound: usize, g: Generator) -> Self {
        reduce(&Self::unreduced(bound, [(g, Q::one())]))
    }

    /// Reduced class of a combination of oriented diagrams.
    pub fn from_oriented<'a>(
        bound: usize,
        terms: impl IntoIterator<Item = (&'a OrientedDiagram, Q)>,
    ) -> Self {
        reduce(&Self::unreduced(
            bound,
            terms.into_iter().map(|(d, q)| (canonical_generator(d), q)),
        ))
    }

    /// Same element with another truncation bound.
    pub fn with_bound(&self, bound: usize) -> Self {
        Self::unreduced(bound, self.terms.clone())
    }

    pub fn coefficient(&self, g: &Generator) -> Q {
        self.terms.get(g).cloned().unwrap_or_else(Q::zero)
    }

    /// Degree-`n` part.
    pub fn component(&self, n: usize) -> Self {
        Self::unreduced(
            self.bound,
            self.terms
                .iter()
                .filter(|(g, _)| g.degree() == n)
                .map(|(g, q)| (g.clone(), q.clone())),
        )
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Generator::degree).collect();
        d.dedup();
        d
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::unreduced(
            self.bound,
            self.terms.iter().map(|(g, q)| (g.clone(), q * k)),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::unreduced(
            self.bound.min(other.bound),
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(g, q)| (g.clone(), q.clone())),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Disjoint-union product, truncated at the smaller bound and reduced.
    pub fn product(&self, other: &Self) -> Self {
        let bound = self.bound.min(other.bound);
        let mut raw = Vec::new();
        for (g1, q1) in &self.terms {
            for (g2, q2) in &other.terms {
                if g1.degree() + g2.degree() > bound {
                    continue;
                }
                let d = g1.representative().disjoint_union(&g2.representative());
                raw.push((canonical_generator(&d), q1 * q2));
            }
        }
        reduce(&Self::unreduced(bound, raw))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one(self.bound);
        for _ in 0..k {
            out = out.product(self);
        }
        out
    }

    /// Degree-`n` part multiplied by `(-1)^n`.
    pub fn bar(&self) -> Self {
        Self::unreduced(
            self.bound,
            self.terms.iter().map(|(g, q)| {
                let q = if g.degree() % 2 == 1 { -q } else { q.clone() };
                (g.clone(), q)
            }),
        )
    }

    /// `Σ_{k ≤ bound} x^k / k!`.
    pub fn exp_truncated(&self) -> Result<Self> {
        if !self.component(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = Self::one(self.bound);
        let mut power = Self::one(self.bound);
        for k in 1..=self.bound {
            power = power.product(self).scale(&rational(1, k as i64));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> AlgebraElementJson {
        AlgebraElementJson {
            bound: self.bound,
            terms: self
                .terms
                .iter()
                .map(|(g, q)| TermJson {
                    diagram: g.representative().to_jacobi().to_json(),
                    coeff: format!("{}/{}", q.numer(), q.denom()),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &AlgebraElementJson) -> Result<Self> {
        let mut raw = Vec::new();
        for t in &j.terms {
            let g = JacobiDiagram::try_from(&t.diagram)?;
            let d = OrientedDiagram::from_jacobi(&g)?;
            raw.push((canonical_generator(&d), parse_rational(&t.coeff)?));
        }
        Ok(reduce(&Self::unreduced(j.bound, raw)))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, q)) in self.terms.iter().enumerate() {
            let sign = if q.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{sign}{}", q.abs())?;
            let edges: Vec<String> = g.key.edges.iter().map(|(a, b)| format!("{a}{b}")).collect();
            write!(f, "[{}|{}]", edges.join(","), g.parity)?;
        }
        Ok(())
    }
}

/// Accepts `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::MalformedInput(format!("bad rational coefficient {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub diagram: DiagramJson,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraElementJson {
    pub bound: usize,
    pub terms: Vec<TermJson>,
}

/// Normal form, degree by degree, modulo AS and IHX.
pub fn reduce(x: &AlgebraElement) -> AlgebraElement {
    let mut by_degree: BTreeMap<usize, BTreeMap<Generator, Q>> = BTreeMap::new();
    for (g, q) in &x.terms {
        by_degree
            .entry(g.degree())
            .or_default()
            .insert(g.clone(), q.clone());
    }
    let mut out = BTreeMap::new();
    for (n, terms) in by_degree {
        out.extend(quotient_unchecked(n).reduce(&terms));
    }
    AlgebraElement {
        bound: x.bound,
        terms: out,
    }
}

/// Class of a labelled edge-oriented diagram equipped with the vertex
/// orientation `vo`: `sign · [Γ, vo]`, where the sign compares the edge and
/// vertex listings of the half-edges. It does not depend on `vo`.
pub fn class_with_orientation(
    g: &LabelledDiagram,
    vo: &VertexOrientation,
    bound: usize,
) -> Result<AlgebraElement> {
    let s = orientation_sign(g, vo)?;
    let d = OrientedDiagram::from_labelled(g, vo)?;
    Ok(AlgebraElement::from_generator(bound, canonical_generator(&d)).scale(&rational(s as i64, 1)))
}

/// Class of a labelled edge-oriented diagram, truncated at
/// `max(degree, default series bound)`.
pub fn class_of_labelled(g: &LabelledDiagram) -> AlgebraElement {
    class_of_labelled_bounded(g, g.degree().max(DEFAULT_SERIES_BOUND))
}

pub fn class_of_labelled_bounded(g: &LabelledDiagram, bound: usize) -> AlgebraElement {
    let vo = canonical_vertex_orientation(g);
    let d = OrientedDiagram::from_labelled(g, &vo).expect("canonical orientation is valid");
    AlgebraElement::from_generator(bound, canonical_generator(&d))
}

/// Same map on a decorated diagram; labels and edge orientation required.
pub fn class_of_labelled_diagram(g: &JacobiDiagram) -> Result<AlgebraElement> {
    Ok(class_of_labelled(&LabelledDiagram::from_diagram(g)?))
}

/// The theta diagram with vertices 1, 2 and all three edges from 1 to 2.
pub fn theta_labelled() -> LabelledDiagram {
    LabelledDiagram::new(vec![(0, 1), (0, 1), (0, 1)]).expect("theta is valid")
}

/// `[θ]`: the class of [`theta_labelled`].
pub fn theta_class(bound: usize) -> AlgebraElement {
    class_of_labelled_bounded(&theta_labelled(), bound)
}

/// Checks that every nonzero component sits in odd degree.
pub fn check_xi_parity(x: &AlgebraElement) -> Result<()> {
    match x.degrees().into_iter().find(|d| d % 2 == 0) {
        Some(d) => Err(Error::BadXiParity(d)),
        None => Ok(()),
    }
}

/// Builds a series from homogeneous components given as `(degree, element)`.
/// Components in even degree, including degree 0, are rejected, so every
/// built series vanishes in even degrees.
pub fn build_xi(bound: usize, components: &[(usize, AlgebraElement)]) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(bound);
    for (d, x) in components {
        if d % 2 == 0 {
            return Err(Error::BadXiParity(*d));
        }
        if x.degrees().iter().any(|e| e != d) {
            return Err(Error::MalformedInput(format!(
                "component declared in degree {d} is not homogeneous of that degree"
            )));
        }
        out = out.add(&x.with_bound(bound));
    }
    Ok(out.with_bound(bound))
}

/// The series with only its degree-one term `-1/12 [θ]`.
pub fn default_xi(bound: usize) -> AlgebraElement {
    theta_class(bound).scale(&rational(-1, 12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_core::canon::canonical_form;
    use crate::diagram_core::labelled::enumerate_labelled;
    use crate::diagram_core::orientation::{orientation_sign, sorted_orientation};
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        rational(n, 1)
    }

    #[test]
    fn theta_orientation_classes_cancel() {
        let d = OrientedDiagram::reference(2, JacobiDiagram::theta().edges);
        let x = AlgebraElement::from_oriented(2, [(&d, q(1)), (&d.reversed_at(1), q(1))]);
        assert!(x.is_zero());
        assert!(!AlgebraElement::from_oriented(2, [(&d, q(1))]).is_zero());
        assert!(reduce(&AlgebraElement::zero(2)).is_zero());
    }

    #[test]
    fn theta_class_and_bar() {
        let th = theta_class(2);
        assert!(!th.is_zero());
        assert_eq!(th.degrees(), vec![1]);
        assert_eq!(th.bar(), th.neg());
        let tt = th.product(&th);
        let key = canonical_form(&JacobiDiagram::theta_theta());
        assert_eq!(tt.terms().len(), 1);
        assert_eq!(tt.terms().keys().next().unwrap().key, key);
    }

    #[test]
    fn reversed_theta_edge_has_computed_sign() {
        let th = theta_class(2);
        let rev = LabelledDiagram::new(vec![(1, 0), (0, 1), (0, 1)]).unwrap();
        // Reversing edge 1 swaps positions 0 and 1 of the edge listing.
        let vo = sorted_orientation(&theta_labelled());
        let vo_rev: VertexOrientation = vo
            .iter()
            .map(|t| t.map(|(e, end)| if e == 0 { (0, 1 - end) } else { (e, end) }))
            .collect();
        let s = orientation_sign(&rev, &vo_rev).unwrap() * orientation_sign(&theta_labelled(), &vo).unwrap();
        assert_eq!(s, -1);
        assert_eq!(class_of_labelled(&rev), th.neg());
    }

    #[test]
    fn class_does_not_depend_on_vertex_orientation() {
        for n in 1..=2 {
            let all = enumerate_labelled(n).unwrap();
            for g in all.iter().step_by(97) {
                let base = class_of_labelled(g);
                let mut vo = sorted_orientation(g);
                for v in 0..g.n_vertices() {
                    vo[v].swap(0, 1);
                    assert_eq!(class_with_orientation(g, &vo, base.bound()).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn theta_automorphic_labellings_agree() {
        let th = theta_class(2);
        for g in enumerate_labelled(1).unwrap() {
            let c = class_of_labelled(&g);
            assert!(c == th || c == th.neg());
        }
        // The two labellings differ by exchanging edge labels 1 and 2.
        let g1 = LabelledDiagram::new(vec![(0, 1), (1, 0), (0, 1)]).unwrap();
        let g2 = LabelledDiagram::new(vec![(1, 0), (0, 1), (0, 1)]).unwrap();
        assert_eq!(class_of_labelled(&g1), class_of_labelled(&g2));
        assert_eq!(class_of_labelled(&g1), th.neg());
    }

    #[test]
    fn exp_of_theta() {
        let a = rational(3, 5);
        let x = theta_class(2).scale(&a);
        let e = x.exp_truncated().unwrap();
        let tt = theta_class(2).product(&theta_class(2));
        let expected = AlgebraElement::one(2)
            .add(&x)
            .add(&tt.scale(&(&a * &a * rational(1, 2))));
        assert_eq!(e, expected);
        assert_eq!(AlgebraElement::zero(2).exp_truncated().unwrap(), AlgebraElement::one(2));
        assert_eq!(
            AlgebraElement::one(2).exp_truncated(),
            Err(Error::NonzeroConstantTerm)
        );
    }

    #[test]
    fn xi_builder_rejects_even_components() {
        let th = theta_class(3);
        let xi = build_xi(3, &[(1, th.clone())]).unwrap();
        assert!(xi.component(2).is_zero());
        assert!(check_xi_parity(&xi).is_ok());
        let tt = th.product(&th);
        assert_eq!(build_xi(3, &[(2, tt.clone())]), Err(Error::BadXiParity(2)));
        assert!(matches!(build_xi(3, &[(1, tt.clone())]), Err(Error::MalformedInput(_))));
        assert_eq!(check_xi_parity(&tt), Err(Error::BadXiParity(2)));
        assert_eq!(default_xi(2), theta_class(2).scale(&rational(-1, 12)));
    }

    #[test]
    fn json_round_trip() {
        let x = theta_class(2)
            .scale(&rational(-1, 12))
            .add(&AlgebraElement::one(2))
            .add(&theta_class(2).pow(2).scale(&rational(7, 3)));
        let j = serde_json::to_string(&x.to_json()).unwrap();
        let back: AlgebraElementJson = serde_json::from_str(&j).unwrap();
        assert_eq!(AlgebraElement::from_json(&back).unwrap(), x);
        assert!(j.contains("1/12\"") && j.contains("7/3\""));
    }

    fn random_element(seed: &[(u8, u8, i8)], bound: usize) -> AlgebraElement {
        let keys: Vec<_> = (0..=2)
            .flat_map(|n| crate::diagram_core::generate::generate_keys(n, false, 4).unwrap())
            .collect();
        AlgebraElement::unreduced(
            bound,
            seed.iter().map(|&(k, p, c)| {
                let key = keys[k as usize % keys.len()].clone();
                let parity = if key.nv == 0 { 0 } else { p % 2 };
                let d = Generator { key, parity }.representative();
                (canonical_generator(&d), q(c as i64))
            }),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reduce_idempotent_and_linear(
            a in prop::collection::vec((0u8..8, 0u8..2, -3i8..=3), 0..6),
            b in prop::collection::vec((0u8..8, 0u8..2, -3i8..=3), 0..6),
        ) {
            let x = random_element(&a, 2);
            let y = random_element(&b, 2);
            let rx = reduce(&x);
            prop_assert_eq!(reduce(&rx), rx.clone());
            let lhs = reduce(&x.scale(&q(2)).sub(&y));
            let rhs = rx.scale(&q(2)).sub(&reduce(&y));
            prop_assert_eq!(lhs, reduce(&rhs));
        }

        #[test]
        fn product_commutative_associative(
            a in prop::collection::vec((0u8..8, 0u8..2, -3i8..=3), 0..4),
            b in prop::collection::vec((0u8..8, 0u8..2, -3i8..=3), 0..4),
            c in prop::collection::vec((0u8..8, 0u8..2, -3i8..=3), 0..4),
        ) {
            let x = reduce(&random_element(&a, 2));
            let y = reduce(&random_element(&b, 2));
            let z = reduce(&random_element(&c, 2));
            prop_assert_eq!(x.product(&y), y.product(&x));
            prop_assert_eq!(x.product(&y).product(&z), x.product(&y.product(&z)));
            prop_assert_eq!(AlgebraElement::one(2).product(&x), x.clone());
            prop_assert_eq!(x.product(&y).bar(), x.bar().product(&y.bar()));
            prop_assert_eq!(x.bar().bar(), x);
        }

        #[test]
        fn bar_commutes_with_exp(
            a in prop::collection::vec((1u8..8, 0u8..2, -3i8..=3), 0..5),
        ) {
            let x = reduce(&random_element(&a, 2));
            let x = x.sub(&x.component(0));
            prop_assert_eq!(x.exp_truncated().unwrap().bar(), x.bar().exp_truncated().unwrap());
        }
    }
}
