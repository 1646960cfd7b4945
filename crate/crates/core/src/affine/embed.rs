use super::set::AffineSet;
use crate::error::{Error, Result};
use crate::fourier::Spectrum;
use crate::group::MatrixGroup;

/// `A_α = {(M, ξ) : M ∈ H, ξ ∈ Spec}`.
///
/// Fails unless `Spec` is symmetric and `H`-invariant (acting by `M`, the
/// convention for an `H^T v` orbit), since only then is `A_α = A_α⁻¹`.
pub fn build_a_alpha(group: &MatrixGroup, spec: &Spectrum) -> Result<AffineSet> {
    if !spec.is_symmetric() {
        return Err(Error::Precondition("spectrum is not symmetric".into()));
    }
    if !spec.is_invariant_under(group, true) {
        return Err(Error::Precondition(
            "spectrum is not invariant under H".into(),
        ));
    }
    let a = AffineSet::from_blocks(group, &spec.points())?;
    if !a.is_symmetric() {
        return Err(Error::Precondition("A_α is not symmetric".into()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fourier::{dft_full, spec_alpha, DftOptions};
    use crate::fp::{FpMatrix, FpVector, PrimeModulus};
    use crate::group::{AffineElement, OrbitSet};

    #[test]
    fn qr7_embedding() {
        let p = PrimeModulus::new(7).unwrap();
        let h = Arc::new(
            MatrixGroup::generate(p, 1, &[FpMatrix::new(p, 1, &[2]).unwrap()], 10).unwrap(),
        );
        let orbit = OrbitSet::compute(h.clone(), &FpVector::new(p, &[1]), true).unwrap();
        let f = dft_full(orbit.points(), DftOptions::default()).unwrap();
        let a = build_a_alpha(&h, &spec_alpha(&f, 0.4).unwrap()).unwrap();
        assert_eq!(a.len(), 21);
        assert!(a.is_symmetric() && a.contains_identity());
        let trivial = build_a_alpha(&h, &spec_alpha(&f, 0.5).unwrap()).unwrap();
        assert_eq!(trivial.len(), 3);
        assert!(trivial.iter().all(|g| g.translation().is_zero()));
    }

    #[test]
    fn trivial_group_and_spectrum() {
        let p = PrimeModulus::new(5).unwrap();
        let h = Arc::new(MatrixGroup::trivial(p, 2));
        let pts = crate::fp::PointSet::from_indices(p, 2, (0..25).collect());
        let f = dft_full(&pts, DftOptions::default()).unwrap();
        let a = build_a_alpha(&h, &spec_alpha(&f, 0.5).unwrap()).unwrap();
        assert_eq!(a.elements(), vec![AffineElement::identity(p, 2)]);
    }
}
