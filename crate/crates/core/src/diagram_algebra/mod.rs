//! The graded algebra of vertex-oriented Jacobi diagrams modulo AS and IHX,
//! with exact rational coefficients.

pub mod element;
pub mod linalg;
pub mod oriented;
pub mod relations;

pub use element::{
    build_xi, check_xi_parity, class_of_labelled, class_of_labelled_bounded,
    class_of_labelled_diagram, class_with_orientation, default_xi, parse_rational, rational,
    reduce, theta_class, theta_labelled, AlgebraElement, AlgebraElementJson,
};
pub use oriented::{canonical_generator, Generator, OrientedDiagram};
pub use relations::{
    dim_A_n, dim_bounded, quotient, quotient_bounded, relation_set, relation_set_bounded,
    Quotient, Relation, RelationKind,
};
