//! Unit quaternions, the covering `ρ: S³ → SO(3)` and the gluing map `g₃`.
//!
//! A quaternion `x₀ + x₁i + x₂j + x₃k` is also written `z₃ + z₄j` with
//! `z₃ = x₀ + x₁i` and `z₄ = x₂ + x₃i`.

use nalgebra::{Matrix3, Quaternion, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rotation3 = Matrix3<f64>;

/// Tolerance on `|‖q‖ − 1|`.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion<f64>);

impl UnitQuaternion {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Result<Self> {
        Self::from_quaternion(Quaternion::new(x0, x1, x2, x3))
    }

    pub fn from_quaternion(q: Quaternion<f64>) -> Result<Self> {
        let n = q.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnit(n));
        }
        Ok(UnitQuaternion(q))
    }

    /// Normalizes `q`; fails only on the zero quaternion.
    pub fn normalize(q: Quaternion<f64>) -> Result<Self> {
        let n = q.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonUnit(n));
        }
        Ok(UnitQuaternion(q / n))
    }

    pub fn identity() -> Self {
        UnitQuaternion(Quaternion::new(1.0, 0.0, 0.0, 0.0))
    }

    /// Uniform on `S³`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Quaternion::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            if q.norm() > 1e-6 {
                return UnitQuaternion(q / q.norm());
            }
        }
    }

    pub fn quaternion(&self) -> Quaternion<f64> {
        self.0
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.0.w, self.0.i, self.0.j, self.0.k]
    }

    /// `(z₃, z₄)` with `q = z₃ + z₄j`.
    pub fn complex_pair(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.0.w, self.0.i), Complex64::new(self.0.j, self.0.k))
    }

    pub fn mul(&self, other: &Self) -> Self {
        UnitQuaternion(self.0 * other.0)
    }

    pub fn conjugate(&self) -> Self {
        UnitQuaternion(self.0.conjugate())
    }
}

/// The pure quaternion with imaginary part `v`.
pub fn pure(v: &Vector3<f64>) -> Quaternion<f64> {
    Quaternion::new(0.0, v.x, v.y, v.z)
}

/// `ρ(q)`: the action `x ↦ q x q⁻¹` on the pure quaternions, in the basis
/// `(i, j, k)`.
pub fn rho(q: &UnitQuaternion) -> Rotation3 {
    let q = q.0;
    let qi = q.conjugate();
    let mut m = Rotation3::zeros();
    for c in 0..3 {
        let image = q * pure(&Vector3::ith(c, 1.0)) * qi;
        m[(0, c)] = image.i;
        m[(1, c)] = image.j;
        m[(2, c)] = image.k;
    }
    m
}

/// The same matrix written in `z₃, z₄`.
pub fn rho_closed_form(q: &UnitQuaternion) -> Rotation3 {
    let (z3, z4) = q.complex_pair();
    let a = z3 * z4.conj();
    let b = z3 * z4;
    let s = z3 * z3 + z4 * z4;
    let d = z3 * z3 - z4 * z4;
    Rotation3::new(
        z3.norm_sqr() - z4.norm_sqr(),
        2.0 * a.im,
        2.0 * a.re,
        2.0 * b.im,
        s.re,
        -d.im,
        -2.0 * b.re,
        s.im,
        d.re,
    )
}

/// The displayed matrix of `g₃`.
pub fn g3(q: &UnitQuaternion) -> Rotation3 {
    let (z3, z4) = q.complex_pair();
    let a = z3 * z4.conj();
    let b = z3 * z4;
    let s = z3 * z3 + z4 * z4;
    let d = z3 * z3 - z4 * z4;
    Rotation3::new(
        d.re,
        -d.im,
        -2.0 * a.re,
        s.im,
        s.re,
        -2.0 * a.im,
        2.0 * b.re,
        -2.0 * b.im,
        z3.norm_sqr() - z4.norm_sqr(),
    )
}

/// The permutation matrix `P₁₃`: `e₁ ↦ −e₃`, `e₃ ↦ e₁`.
pub fn p13() -> Rotation3 {
    Rotation3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0)
}

/// `ξ: CP¹ → S²`, `(z₁ : z₂) ↦ (z; h)`; the point `(z; h)` is
/// `(Re z, Im z, h) ∈ ℝ³`.
fn xi_of(z1: Complex64, z2: Complex64) -> (Complex64, f64) {
    let n = z1.norm_sqr() + z2.norm_sqr();
    (2.0 * z1 * z2.conj() / n, (z2.norm_sqr() - z1.norm_sqr()) / n)
}

/// `g₃(q)` applied to `x ∈ S²` through the right action of `q` on
/// `CP¹ = ℂ* \ ℍ*`: `[z + (1+h)j] ↦ [(z + (1+h)j)(z₃ + z₄j)]`, read back
/// with `ξ(z₁ : z₂)`. Requires `h ≠ −1`.
pub fn g3_on_sphere(q: &UnitQuaternion, x: &Vector3<f64>) -> Result<Vector3<f64>> {
    let h = x.z;
    if (1.0 + h).abs() < 1e-12 {
        return Err(Error::NotApplicable("stereographic chart excludes h = -1".into()));
    }
    let z = Complex64::new(x.x, x.y);
    let line = Quaternion::new(z.re, z.im, 1.0 + h, 0.0) * q.0;
    let (w, hh) = xi_of(Complex64::new(line.w, line.i), Complex64::new(line.j, line.k));
    Ok(Vector3::new(w.re, w.im, hh))
}

/// The proof's formulas `z′ = −2h z₃z̄₄ + z₃²z − z̄₄²z̄`,
/// `h′ = h(|z₃|² − |z₄|²) + 2Re(z z₃z₄)`.
pub fn g3_stereographic_formula(q: &UnitQuaternion, x: &Vector3<f64>) -> Vector3<f64> {
    let (z3, z4) = q.complex_pair();
    let z = Complex64::new(x.x, x.y);
    let h = x.z;
    let zp = -2.0 * h * z3 * z4.conj() + z3 * z3 * z - z4.conj() * z4.conj() * z.conj();
    let hp = h * (z3.norm_sqr() - z4.norm_sqr()) + 2.0 * (z * z3 * z4).re;
    Vector3::new(zp.re, zp.im, hp)
}

fn max_abs(m: &Rotation3) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Residuals of both candidate conjugation identities at `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G3Residuals {
    /// `‖g₃ − P₁₃ρ⁻¹P₁₃⁻¹‖_max`.
    pub with_inverse: f64,
    /// `‖g₃ − P₁₃ρ⁻¹P₁₃‖_max`.
    pub without_inverse: f64,
}

pub fn g3_conjugation_residuals(q: &UnitQuaternion) -> G3Residuals {
    let p = p13();
    let rinv = rho(q).transpose();
    let g = g3(q);
    G3Residuals {
        with_inverse: max_abs(&(g - p * rinv * p.transpose())),
        without_inverse: max_abs(&(g - p * rinv * p)),
    }
}

/// `‖g₃ − P₁₃ρ⁻¹P₁₃⁻¹‖_max`: the conjugator that holds.
pub fn g3_conjugation_residual(q: &UnitQuaternion) -> f64 {
    g3_conjugation_residuals(q).with_inverse
}

/// Deviation from `SO(3)`: `max(‖MᵀM − 1‖_max, |det M − 1|)`.
pub fn so3_defect(m: &Rotation3) -> f64 {
    max_abs(&(m.transpose() * m - Rotation3::identity())).max((m.determinant() - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn approx(a: &Rotation3, b: &Rotation3) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn rejects_non_units() {
        assert!(matches!(UnitQuaternion::new(1.0, 1.0, 0.0, 0.0), Err(Error::NonUnit(_))));
        assert!(UnitQuaternion::new(1.0 + 1e-13, 0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&UnitQuaternion::identity()), Rotation3::identity());
        let i = UnitQuaternion::new(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(approx(&rho(&i), &Rotation3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))) < 1e-15);
    }

    #[test]
    fn rho_is_a_homomorphism_into_so3() {
        let mut r = rng::master(11);
        for _ in 0..1000 {
            let a = UnitQuaternion::random(&mut r);
            let b = UnitQuaternion::random(&mut r);
            assert!(approx(&(rho(&a) * rho(&b)), &rho(&a.mul(&b))) < 1e-12);
            assert!(so3_defect(&rho(&a)) < 1e-12);
            assert!(approx(&rho(&a), &rho_closed_form(&a)) < 1e-12);
        }
    }

    #[test]
    fn rho_matches_an_external_rotation_matrix() {
        let mut r = rng::master(12);
        for _ in 0..100 {
            let a = UnitQuaternion::random(&mut r);
            let ext = nalgebra::UnitQuaternion::from_quaternion(a.quaternion());
            assert!(approx(&rho(&a), ext.to_rotation_matrix().matrix()) < 1e-12);
        }
    }

    #[test]
    fn g3_identity_and_conjugation() {
        assert_eq!(g3(&UnitQuaternion::identity()), Rotation3::identity());
        let mut r = rng::master(13);
        for _ in 0..1000 {
            let q = UnitQuaternion::random(&mut r);
            let res = g3_conjugation_residuals(&q);
            assert!(res.with_inverse < 1e-12);
            assert!(so3_defect(&g3(&q)) < 1e-12);
        }
        // The variant without the inverse fails away from a measure-zero set.
        let q = UnitQuaternion::new(0.6, 0.0, 0.8, 0.0).unwrap();
        assert!(g3_conjugation_residuals(&q).without_inverse > 0.1);
    }

    #[test]
    fn g3_matches_both_stereographic_routes() {
        let mut r = rng::master(14);
        for _ in 0..1000 {
            let q = UnitQuaternion::random(&mut r);
            let x = UnitQuaternion::random(&mut r).coords();
            let x = Vector3::new(x[0], x[1], x[2]).normalize();
            if x.z < -0.999 {
                continue;
            }
            let m = g3(&q) * x;
            assert!((g3_stereographic_formula(&q, &x) - m).norm() < 1e-12);
            assert!((g3_on_sphere(&q, &x).unwrap() - m).norm() < 1e-9);
        }
    }
}
