//! Matrix identities of the quaternionic constructions, degree and linking
//! integrals, the extended propagator and the framing correction.

pub mod cmr;
pub mod degree;
pub mod framing;
pub mod linking;
pub mod propagator;
pub mod quaternion;

use rayon::prelude::*;
use serde::Serialize;

pub use cmr::{cmr_block_check, mr_complex, CmrResidual, Unitary4};
pub use degree::{map_degree, named, DegreeEstimate, NamedMap, S3Map};
pub use framing::{framing_correct, framing_factor, FramedSeries};
pub use linking::{
    crossing_count_linking, gauss_linking, hopf_pair, split_pair, CurveJson, LinkJson, LinkingEstimate,
    ParametricCurve,
};
pub use propagator::{limit_check, p_s3_extended, ConfigPair, LimitCheck};
pub use quaternion::{
    g3, g3_conjugation_residual, g3_conjugation_residuals, p13, rho, rho_closed_form, G3Residuals,
    Rotation3, UnitQuaternion,
};

use crate::rng;

/// Maximum residuals of the matrix identities over random unit quaternions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixIdentityReport {
    pub seed: u64,
    pub samples: usize,
    /// `ρ` by conjugation against its closed form.
    pub rho_closed_form: f64,
    /// `ρ(q)ρ(q′) − ρ(qq′)`.
    pub rho_homomorphism: f64,
    /// `g₃ − P₁₃ρ⁻¹P₁₃⁻¹`, the identity that holds.
    pub g3_with_inverse: f64,
    /// Smallest `‖g₃ − P₁₃ρ⁻¹P₁₃‖` met: the variant without the inverse.
    pub g3_without_inverse_min: f64,
    /// `g₃` against the stereographic `(z′, h′)` formulas.
    pub g3_stereographic: f64,
    pub cmr_block: f64,
    pub cmr_upper_block: f64,
}

/// Sample `k` uses random stream `k` of `seed`.
pub fn matrix_identity_report(seed: u64, samples: usize) -> MatrixIdentityReport {
    let rows: Vec<[f64; 7]> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k);
            let q = UnitQuaternion::random(&mut r);
            let q2 = UnitQuaternion::random(&mut r);
            let x = UnitQuaternion::random(&mut r).coords();
            let x = nalgebra::Vector3::new(x[0], x[1], x[2]).normalize();
            let max = |m: Rotation3| m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let g = g3_conjugation_residuals(&q);
            let c = cmr_block_check(&q);
            [
                max(rho(&q) - rho_closed_form(&q)),
                max(rho(&q) * rho(&q2) - rho(&q.mul(&q2))),
                g.with_inverse,
                g.without_inverse,
                (quaternion::g3_stereographic_formula(&q, &x) - g3(&q) * x).norm(),
                c.block,
                c.upper_block,
            ]
        })
        .collect();
    let max_of = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, f64::max);
    MatrixIdentityReport {
        seed,
        samples,
        rho_closed_form: max_of(0),
        rho_homomorphism: max_of(1),
        g3_with_inverse: max_of(2),
        g3_without_inverse_min: rows.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min),
        g3_stereographic: max_of(4),
        cmr_block: max_of(5),
        cmr_upper_block: max_of(6),
    }
}
