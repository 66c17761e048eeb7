//! Framing correction `Z = Z(τ)·exp((p₁(τ)/4)·ξ)`.

use crate::diagram_algebra::{check_xi_parity, rational, AlgebraElement};
use crate::error::{Error, Result};

/// A series computed with a trivialization of Pontryagin number `p1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedSeries {
    pub z: AlgebraElement,
    pub p1: i64,
    /// Set when the trivialization comes from a ℤ-sphere, forcing `p1 ∈ 4ℤ`.
    pub integral_sphere: bool,
}

impl FramedSeries {
    pub fn new(z: AlgebraElement, p1: i64, integral_sphere: bool) -> Result<Self> {
        let fs = FramedSeries { z, p1, integral_sphere };
        fs.validate()?;
        Ok(fs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.z.component(0) != AlgebraElement::one(self.z.bound()) {
            return Err(Error::MalformedInput("degree-0 term must be 1[∅]".into()));
        }
        if self.integral_sphere && self.p1 % 4 != 0 {
            return Err(Error::MalformedInput(format!(
                "p1 = {} is not a multiple of 4 for a ℤ-sphere",
                self.p1
            )));
        }
        Ok(())
    }
}

/// `exp((k/4)·ξ)` truncated at the bound of `xi`.
pub fn framing_factor(p1: i64, xi: &AlgebraElement) -> Result<AlgebraElement> {
    check_xi_parity(xi)?;
    xi.scale(&rational(p1, 4)).exp_truncated()
}

/// `fs.z · exp((fs.p1/4)·ξ)`, truncated at the smaller of the two bounds.
pub fn framing_correct(fs: &FramedSeries, xi: &AlgebraElement) -> Result<AlgebraElement> {
    fs.validate()?;
    let bound = fs.z.bound().min(xi.bound());
    let f = framing_factor(fs.p1, &xi.with_bound(bound))?;
    Ok(fs.z.with_bound(bound).product(&f))
}
