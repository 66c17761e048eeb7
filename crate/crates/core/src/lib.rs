//! Computable pieces of the configuration-space construction of the
//! Kontsevich–Kuperberg–Thurston invariant.
//!
//! * [`diagram_core`]: trivalent Jacobi diagrams, canonical forms,
//!   automorphism counts and labelled, edge-oriented decorations.
//! * [`diagram_algebra`]: the graded algebra of oriented diagrams modulo
//!   AS and IHX over exact rationals.
//! * [`face_combinatorics`]: codimension-one faces of the compactified
//!   configuration spaces and the combinatorial cancellation checks.
//! * [`fmc_charts`]: the chart map and its retraction for nested collapse
//!   trees, in the finite and the point-at-infinity variants.
//! * [`numeric_geometry`]: quaternionic matrix identities, degree and
//!   linking integrals, the extended propagator and framing corrections.

pub mod config;
pub mod diagram_algebra;
pub mod diagram_core;
pub mod error;
pub mod face_combinatorics;
pub mod fmc_charts;
pub mod numeric_geometry;
pub mod rng;

pub use error::{Error, Result};
