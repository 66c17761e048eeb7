//! Codimension-one faces of the compactified configuration spaces and the
//! combinatorial checks showing that, summed over labelled diagrams, only
//! the anomaly face `F(V)` contributes.

pub mod check;
pub mod faces;

pub use check::{boundary_cancellation_check, cancellation_report, CancellationReport};
pub use faces::{
    classify_face, enumerate_faces, face_count_formula, ihx_family, induced_subgraph, sigma,
    sigma_edges_parallel, Ambient, FaceClassification, FaceDescriptor, FaceKind, InducedSubgraph,
};
