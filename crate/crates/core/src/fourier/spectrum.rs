use std::cmp::Ordering;

use bitvec::vec::BitVec;
use num_bigint::BigInt;
use num_rational::BigRational;

use super::exact::{CyclotomicEvaluator, EXACT_MAX_P};
use super::field::SpectrumField;
use super::level::Level;
use crate::error::{Error, Result};
use crate::fp::{FpVector, PointSet, PrimeModulus};
use crate::group::MatrixGroup;

/// Width of the float margin band, in units of the tolerance `τ`.
pub const MARGIN_BAND: f64 = 10.0;

/// `Spec_α(I) = {ξ : |S(ξ)| > α|I|}` as a bitset over rank indices.
///
/// Cells whose magnitude lies within `MARGIN_BAND · τ` of `α|I|` are either resolved
/// by the exact evaluator or recorded in [`Spectrum::margin_flags`]; an unresolved
/// cell is included iff `|S(ξ)| > α|I| + τ`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    modulus: PrimeModulus,
    dim: usize,
    level: Level,
    source_size: usize,
    members: BitVec,
    count: usize,
    flagged: Vec<u64>,
    resolved: usize,
}

impl Spectrum {
    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn alpha(&self) -> f64 {
        self.level.value()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, xi: &FpVector) -> bool {
        self.contains_index(xi.rank_index())
    }

    pub fn contains_index(&self, i: u64) -> bool {
        self.members.get(i as usize).is_some_and(|b| *b)
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter_ones().map(|i| i as u64)
    }

    pub fn vectors(&self) -> Vec<FpVector> {
        self.indices()
            .map(|i| FpVector::from_index(self.modulus, self.dim, i))
            .collect()
    }

    pub fn points(&self) -> PointSet {
        PointSet::from_indices(self.modulus, self.dim, self.indices().collect())
    }

    /// Band cells that no exact comparison settled.
    pub fn margin_flags(&self) -> &[u64] {
        &self.flagged
    }

    /// Band cells settled by the exact evaluator.
    pub fn resolved_count(&self) -> usize {
        self.resolved
    }

    pub fn is_conclusive(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn is_flagged(&self, i: u64) -> bool {
        self.flagged.binary_search(&i).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.indices()
            .all(|i| self.contains(&FpVector::from_index(self.modulus, self.dim, i).neg()))
    }

    /// `M·Spec = Spec` for every `M ∈ H`, acting by `M` when the source orbit is
    /// `H^T v` and by `M^T` when it is `Hv`. Generators suffice for a finite group.
    pub fn is_invariant_under(&self, group: &MatrixGroup, transposed_orbit: bool) -> bool {
        let gens: Vec<_> = if group.generators().is_empty() {
            group.iter().cloned().collect()
        } else {
            group.generators().to_vec()
        };
        let vs = self.vectors();
        gens.iter().all(|g| {
            vs.iter().all(|xi| {
                let image = if transposed_orbit {
                    g.apply(xi)
                } else {
                    g.apply_transpose(xi)
                };
                self.contains(&image)
            })
        })
    }
}

/// Threshold `α|I|` compared against every cell of `field`.
pub fn spec_at(
    field: &SpectrumField,
    level: &Level,
    mut exact: Option<&mut CyclotomicEvaluator>,
) -> Spectrum {
    let n = field.source_size();
    let threshold = level.value() * n as f64;
    let tau = field.tolerance();
    let band = MARGIN_BAND * tau;
    let threshold_sq =
        level.exact() * level.exact() * BigRational::from_integer(BigInt::from(n * n));
    let mut source = None;
    let mut members = BitVec::repeat(false, field.len());
    let mut flagged = Vec::new();
    let mut resolved = 0;
    for (i, &mag) in field.magnitudes().iter().enumerate() {
        let inside = if mag > threshold + band {
            true
        } else if mag <= threshold - band {
            false
        } else {
            let decided = exact.as_deref_mut().and_then(|ev| {
                let pts = source.get_or_insert_with(|| field.source().to_vectors());
                let xi = FpVector::from_index(field.modulus(), field.dim(), i as u64);
                ev.compare_norm_sq(pts, &xi, &threshold_sq)
            });
            match decided {
                Some(ord) => {
                    resolved += 1;
                    ord == Ordering::Greater
                }
                None => {
                    flagged.push(i as u64);
                    mag > threshold + tau
                }
            }
        };
        members.set(i, inside);
    }
    let count = members.count_ones();
    Spectrum {
        modulus: field.modulus(),
        dim: field.dim(),
        level: level.clone(),
        source_size: n,
        members,
        count,
        flagged,
        resolved,
    }
}

fn check_alpha(alpha: f64) -> Result<Level> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "α must lie in (0, 1], got {alpha}"
        )));
    }
    Level::decimal(alpha)
}

/// `Spec_α` with float comparisons and margin flags.
pub fn spec_alpha(field: &SpectrumField, alpha: f64) -> Result<Spectrum> {
    Ok(spec_at(field, &check_alpha(alpha)?, None))
}

/// `Spec_α` with band cells resolved exactly; requires `p ≤ 61`.
pub fn spec_alpha_exact(field: &SpectrumField, alpha: f64) -> Result<Spectrum> {
    let level = check_alpha(alpha)?;
    if field.modulus().get() > EXACT_MAX_P {
        return Err(Error::InvalidArgument(format!(
            "exact mode supports p ≤ {EXACT_MAX_P}"
        )));
    }
    let mut ev = CyclotomicEvaluator::new(field.modulus())?;
    Ok(spec_at(field, &level, Some(&mut ev)))
}

/// `max_{ξ≠0} |S(ξ)| / |I|`.
pub fn max_nonzero_ratio(field: &SpectrumField) -> f64 {
    field.max_nonzero_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{dft_full, DftOptions};
    use crate::fp::Subspace;

    fn qr7_field() -> SpectrumField {
        let m = PrimeModulus::new(7).unwrap();
        let pts = PointSet::new(m, 1, [1, 2, 4].iter().map(|&c| FpVector::new(m, &[c]))).unwrap();
        dft_full(&pts, DftOptions::default()).unwrap()
    }

    #[test]
    fn qr7_spectra() {
        let f = qr7_field();
        let half = spec_alpha(&f, 0.5).unwrap();
        assert_eq!(half.indices().collect::<Vec<_>>(), vec![0]);
        let low = spec_alpha(&f, 0.4).unwrap();
        assert_eq!(low.len(), 7);
        assert!(low.is_symmetric() && low.is_conclusive());
    }

    #[test]
    fn tie_is_flagged_then_resolved() {
        // √2 / 3 is irrational, so α = √2/3 rounded sits in the band of every nonzero cell
        let f = qr7_field();
        let alpha = 2f64.sqrt() / 3.0;
        let float = spec_alpha(&f, alpha).unwrap();
        assert_eq!(float.margin_flags().len(), 6);
        let exact = spec_alpha_exact(&f, alpha).unwrap();
        assert!(exact.is_conclusive());
        assert_eq!(exact.resolved_count(), 6);
        // the decimal α is below √2/3 iff its square is below 2/9
        let below = Level::decimal(alpha).unwrap().exact().clone();
        let below = &below * &below < BigRational::new(2.into(), 9.into());
        assert_eq!(exact.len(), if below { 7 } else { 1 });
    }

    #[test]
    fn full_alpha_excludes_origin() {
        let f = qr7_field();
        let s = spec_alpha_exact(&f, 1.0).unwrap();
        assert!(s.is_empty());
        assert!(spec_alpha(&f, 0.0).is_err());
    }

    #[test]
    fn unipotent_orbit_spectrum_is_invariant() {
        let m = PrimeModulus::new(5).unwrap();
        let shear = crate::fp::FpMatrix::from_rows(m, &[vec![1, 1], vec![0, 1]]).unwrap();
        let h = std::sync::Arc::new(MatrixGroup::generate(m, 2, &[shear], 100).unwrap());
        let orbit =
            crate::group::OrbitSet::compute(h.clone(), &FpVector::new(m, &[1, 0]), true).unwrap();
        let f = dft_full(orbit.points(), DftOptions::default()).unwrap();
        let s = spec_alpha(&f, 0.5).unwrap();
        // S(ξ) = e_p(ξ₁) Σ_t e_p(ξ₂ t), so Spec is the line ξ₂ = 0
        let line = Subspace::span(m, 2, &[FpVector::new(m, &[1, 0])]).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.vectors().iter().all(|x| line.contains(x)));
        assert!(s.is_invariant_under(&h, true));
    }
}
