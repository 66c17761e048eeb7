//! Jacobi diagrams: representation, generation up to isomorphism,
//! automorphism counts, labelled edge-oriented decorations and the sign
//! comparing edge and vertex orientations of the half-edge set.

pub mod automorphism;
pub mod canon;
pub mod diagram;
pub mod generate;
pub mod labelled;
pub mod orientation;

pub use automorphism::count_automorphisms;
pub use canon::{canonical_form, canonical_labeling, is_isomorphic, CanonKey};
pub use diagram::{parse_diagram, DiagramJson, HalfEdge, JacobiDiagram};
pub use generate::{generate_diagrams, generate_diagrams_bounded, generate_keys};
pub use labelled::{
    enumerate_labelled, enumerate_labelled_bounded, labelled_count_formula, LabelledDiagram,
    LabelledHalfEdge,
};
pub use orientation::{
    canonical_vertex_orientation, orientation_sign, orientation_sign_diagram, permutation_sign,
    VertexOrientation,
};
