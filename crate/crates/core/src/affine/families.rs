//! Candidate approximate groups `B` for the lemma verifiers: subgroups `K₀ ⋉ W`,
//! bounded unions of their cosets, and random symmetric thickenings.

use num_rational::BigRational;

use super::growth::greedy_cover;
use super::set::{AffineSet, SetCaps};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{PointSet, Subspace};
use crate::group::{AffineElement, MatrixGroup};
use crate::random::{random_affine, LabRng};

/// `{(M, w) : M ∈ K₀, w ∈ W}` for a `K₀`-invariant subspace `W`; a subgroup of `Aff_d(F_p)`.
pub fn semidirect(k0: &MatrixGroup, w: &Subspace) -> Result<AffineSet> {
    if !k0.iter().all(|m| w.is_invariant_under(m)) {
        return Err(Error::Precondition("W is not invariant under K₀".into()));
    }
    let points = PointSet::new(w.modulus(), w.ambient_dim(), w.elements())?;
    AffineSet::from_blocks(k0, &points)
}

/// `(base ∪ ⋃_s s·base)` symmetrized.
pub fn coset_union(base: &AffineSet, shifts: &[AffineElement]) -> Result<AffineSet> {
    let mut acc = base.clone();
    for s in shifts {
        acc = acc.union(&base.left_translate(s)?)?;
    }
    Ok(acc.symmetrized())
}

/// `base` plus `extra` random elements, symmetrized.
pub fn thickening(base: &AffineSet, extra: usize, rng: &mut LabRng) -> Result<AffineSet> {
    let noise = (0..extra)
        .map(|_| random_affine(base.modulus(), base.dim(), rng))
        .collect::<Result<Vec<_>>>()?;
    let noise = AffineSet::new(base.modulus(), base.dim(), noise)?;
    Ok(base.union(&noise)?.symmetrized())
}

/// Subspaces of `F_p^d` invariant under every element of `group`, including `0` and `F_p^d`.
pub fn invariant_subspaces(group: &MatrixGroup) -> Vec<Subspace> {
    let gens: Vec<_> = if group.generators().is_empty() {
        group.iter().cloned().collect()
    } else {
        group.generators().to_vec()
    };
    Subspace::enumerate_all(group.modulus(), group.dim())
        .into_iter()
        .filter(|s| gens.iter().all(|g| s.is_invariant_under(g)))
        .collect()
}

/// Distinct cyclic subgroups `⟨g⟩`, `g ∈ group`, ordered by size then first appearance.
pub fn cyclic_subgroups(group: &MatrixGroup) -> Result<Vec<MatrixGroup>> {
    let mut found: Vec<MatrixGroup> = Vec::new();
    for g in group.iter() {
        if found
            .iter()
            .any(|s| s.contains(g) && s.order() > 1 && s.generators().iter().any(|h| h == g))
        {
            continue;
        }
        let c = MatrixGroup::generate(
            group.modulus(),
            group.dim(),
            std::slice::from_ref(g),
            group.order(),
        )?;
        if !found
            .iter()
            .any(|s| s.order() == c.order() && c.iter().all(|x| s.contains(x)))
        {
            found.push(c);
        }
    }
    found.sort_by_key(MatrixGroup::order);
    Ok(found)
}

/// Smallest `K` (as a float not below the exact value) for which `B` satisfies the
/// lemma hypotheses against `A` and `g`: the greedy covering number of `B`,
/// `|B| / |A|` and `|A| / |A ∩ gB|`. `None` when `A ∩ gB` is empty or `B` is not a
/// symmetric set containing 1.
pub fn fitted_k(
    a: &AffineSet,
    b: &AffineSet,
    g: &AffineElement,
    caps: SetCaps,
    exec: Execution,
) -> Result<Option<f64>> {
    if !b.contains_identity() || !b.is_symmetric() {
        return Ok(None);
    }
    let meet = a.intersection_len(&b.left_translate(g)?);
    if meet == 0 {
        return Ok(None);
    }
    let b2 = b.product(b, caps, exec)?;
    let ratio = |n: usize, d: usize| BigRational::new(n.into(), d.into());
    let need = [
        ratio(greedy_cover(b, &b2)?, 1),
        ratio(b.len(), a.len()),
        ratio(a.len(), meet),
        ratio(1, 1),
    ]
    .into_iter()
    .max()
    .expect("nonempty");
    let mut k = num_traits::ToPrimitive::to_f64(&need).expect("finite ratio");
    while BigRational::from_float(k).expect("finite") < need {
        k = f64::from_bits(k.to_bits() + 1);
    }
    Ok(Some(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::{FpMatrix, FpVector, PrimeModulus};
    use crate::random::rng;

    #[test]
    fn semidirect_is_a_group() {
        let p = PrimeModulus::new(5).unwrap();
        let k0 = MatrixGroup::generate(p, 2, &[FpMatrix::diagonal(p, &[2, 3])], 10).unwrap();
        let w = Subspace::span(p, 2, &[FpVector::new(p, &[1, 0])]).unwrap();
        let b = semidirect(&k0, &w).unwrap();
        assert_eq!(b.len(), 20);
        assert_eq!(
            b.product(&b, SetCaps::default(), Execution::Sequential)
                .unwrap(),
            b
        );
        let skew = Subspace::span(p, 2, &[FpVector::new(p, &[1, 1])]).unwrap();
        assert!(semidirect(&k0, &skew).is_err());
        assert_eq!(invariant_subspaces(&k0).len(), 4);
    }

    #[test]
    fn unions_and_thickenings_are_symmetric() {
        let p = PrimeModulus::new(5).unwrap();
        let k0 = MatrixGroup::generate(p, 1, &[FpMatrix::new(p, 1, &[4]).unwrap()], 10).unwrap();
        let base = semidirect(&k0, &Subspace::zero(p, 1)).unwrap();
        let s = AffineElement::translation_by(FpVector::new(p, &[1]));
        let u = coset_union(&base, std::slice::from_ref(&s)).unwrap();
        assert!(u.is_symmetric() && u.contains_identity());
        assert!(u.contains(&s) && u.contains(&s.inv()));
        let t = thickening(&base, 3, &mut rng(5)).unwrap();
        assert!(t.is_symmetric() && t.len() >= base.len());
    }

    #[test]
    fn cyclic_subgroups_of_f7_units() {
        let p = PrimeModulus::new(7).unwrap();
        let h = MatrixGroup::generate(p, 1, &[FpMatrix::new(p, 1, &[3]).unwrap()], 10).unwrap();
        let orders: Vec<usize> = cyclic_subgroups(&h)
            .unwrap()
            .iter()
            .map(MatrixGroup::order)
            .collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
    }

    #[test]
    fn fitted_k_meets_hypotheses() {
        let p = PrimeModulus::new(7).unwrap();
        let h = MatrixGroup::generate(p, 1, &[FpMatrix::new(p, 1, &[3]).unwrap()], 10).unwrap();
        let a = semidirect(&h, &Subspace::zero(p, 1)).unwrap();
        let b = semidirect(&h, &Subspace::full(p, 1)).unwrap();
        let k = fitted_k(
            &a,
            &b,
            &AffineElement::identity(p, 1),
            SetCaps::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(k, Some(7.0));
    }
}
