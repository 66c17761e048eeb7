//! Complex block structure of the complexified right multiplication
//! `c(m_r)`.

use nalgebra::{Matrix2, Matrix4, Quaternion};
use num_complex::Complex64;
use serde::Serialize;

use super::quaternion::UnitQuaternion;

pub type Unitary4 = Matrix4<Complex64>;
pub type Unitary2 = Matrix2<Complex64>;

/// Right multiplication `x ↦ x·v` on `ℍ = ℝ⟨1, i, j, k⟩`, complexified.
pub fn right_multiplication(v: &UnitQuaternion) -> Unitary4 {
    let v = v.quaternion();
    let mut m = Unitary4::zeros();
    let basis = [
        Quaternion::new(1.0, 0.0, 0.0, 0.0),
        Quaternion::new(0.0, 1.0, 0.0, 0.0),
        Quaternion::new(0.0, 0.0, 1.0, 0.0),
        Quaternion::new(0.0, 0.0, 0.0, 1.0),
    ];
    for (c, e) in basis.iter().enumerate() {
        let y = e * v;
        for (r, x) in [y.w, y.i, y.j, y.k].into_iter().enumerate() {
            m[(r, c)] = Complex64::new(x, 0.0);
        }
    }
    m
}

/// Columns `√2/2 (1 − Ii, j − Ik, 1 + Ii, j + Ik)` in the real basis
/// `(1, i, j, k)`, with `I` the complex unit of the complexification.
pub fn block_basis() -> Unitary4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o = Complex64::new(0.0, 0.0);
    let r = Complex64::new(s, 0.0);
    let im = Complex64::new(0.0, s);
    Unitary4::new(
        r, o, r, o, //
        -im, o, im, o, //
        o, r, o, r, //
        o, -im, o, im,
    )
}

/// `m_r^ℂ(z₁ + z₂j) = [z₁ −z̄₂; z₂ z̄₁]`.
pub fn mr_complex(v: &UnitQuaternion) -> Unitary2 {
    let (z1, z2) = v.complex_pair();
    Unitary2::new(z1, -z2.conj(), z2, z1.conj())
}

/// The displayed block matrix of `c(m_r)(z₁ + z₂j)`.
pub fn cmr_block_display(v: &UnitQuaternion) -> Unitary4 {
    let (z1, z2) = v.complex_pair();
    let o = Complex64::new(0.0, 0.0);
    Unitary4::new(
        z1, -z2.conj(), o, o, //
        z2, z1.conj(), o, o, //
        o, o, z1.conj(), -z2, //
        o, o, z2.conj(), z1,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmrResidual {
    /// `‖B⁻¹ c(m_r) B − display‖_max`.
    pub block: f64,
    /// `‖upper block − m_r^ℂ‖_max`.
    pub upper_block: f64,
    /// `‖B*B − 1‖_max`.
    pub basis_unitarity: f64,
}

fn max_abs<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<Complex64, R, C>,
) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.norm()))
}

/// Conjugates `c(m_r)(v)` by the block basis and compares with the display.
pub fn cmr_block_check(v: &UnitQuaternion) -> CmrResidual {
    let b = block_basis();
    let bstar = b.adjoint();
    let conj = bstar * right_multiplication(v) * b;
    let upper: Unitary2 = conj.fixed_view::<2, 2>(0, 0).into_owned();
    CmrResidual {
        block: max_abs(&(conj - cmr_block_display(v))),
        upper_block: max_abs(&(upper - mr_complex(v))),
        basis_unitarity: max_abs(&(bstar * b - Unitary4::identity())),
    }
}
