use std::fmt;

use super::closure::GroupElement;
use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector, PrimeModulus};

/// An element `(M, ξ)` of `Aff_d(F_p)`: the block matrix `[[M, ξ], [0, 1]]`.
/// Composition is `(M₁, ξ₁)(M₂, ξ₂) = (M₁M₂, M₁ξ₂ + ξ₁)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElement {
    linear: FpMatrix,
    translation: FpVector,
}

impl AffineElement {
    pub fn new(linear: FpMatrix, translation: FpVector) -> Result<Self> {
        if linear.modulus() != translation.modulus() {
            return Err(Error::ModulusMismatch(
                linear.modulus().get(),
                translation.modulus().get(),
            ));
        }
        if linear.dim() != translation.dim() {
            return Err(Error::DimensionMismatch(linear.dim(), translation.dim()));
        }
        if !linear.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self {
            linear,
            translation,
        })
    }

    pub fn identity(modulus: PrimeModulus, dim: usize) -> Self {
        Self {
            linear: FpMatrix::identity(modulus, dim),
            translation: FpVector::zero(modulus, dim),
        }
    }

    pub fn translation_by(xi: FpVector) -> Self {
        Self {
            linear: FpMatrix::identity(xi.modulus(), xi.dim()),
            translation: xi,
        }
    }

    pub fn linear(&self) -> &FpMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &FpVector {
        &self.translation
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.linear.modulus()
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.translation.is_zero()
    }

    /// Nonidentity element of the translation subgroup `{(I, ξ)}`.
    pub fn is_pure_translation(&self) -> bool {
        self.linear.is_identity() && !self.translation.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            linear: self.linear.mul(&other.linear),
            translation: self.linear.apply(&other.translation).add(&self.translation),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(
                self.modulus().get(),
                other.modulus().get(),
            ));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.mul(other))
    }

    /// `(M, ξ)⁻¹ = (M⁻¹, −M⁻¹ξ)`.
    pub fn inv(&self) -> Self {
        let li = self
            .linear
            .inverse()
            .expect("affine elements have invertible linear part");
        let t = li.apply(&self.translation).neg();
        Self {
            linear: li,
            translation: t,
        }
    }
}

impl GroupElement for AffineElement {
    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn inverse(&self) -> Self {
        self.inv()
    }
}

impl GroupElement for FpMatrix {
    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn inverse(&self) -> Self {
        FpMatrix::inverse(self).expect("group elements are invertible")
    }
}

/// `g h g⁻¹ h⁻¹` computed by direct composition.
pub fn commutator(g: &AffineElement, h: &AffineElement) -> Result<AffineElement> {
    g.try_mul(h)?;
    Ok(g.commutator(h))
}

impl fmt::Debug for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.linear, self.translation)
    }
}
