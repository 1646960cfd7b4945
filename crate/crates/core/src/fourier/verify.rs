use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use super::exact::CyclotomicEvaluator;
use super::field::SpectrumField;
use super::spectrum::{spec_at, Spectrum};
use super::sums::{exp_sum_with, CharacterTable};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{FpVector, Subspace};
use crate::group::InstanceProfile;
use crate::Verdict;

/// Default bound on enumerated frequency pairs.
pub const DEFAULT_PAIR_CAP: u64 = 100_000_000;

/// Default bound on `|V| · |F_p^d / V⊥|` work in the concentration check.
pub const DEFAULT_CONCENTRATION_CAP: u64 = 50_000_000;

/// Relative tolerance for the Parseval identities.
pub const PARSEVAL_TOLERANCE: f64 = 1e-6;

/// Sanity of a full transform: origin, Parseval and symmetry.
#[derive(Clone, Debug, Serialize)]
pub struct FieldReport {
    pub origin_error: f64,
    pub parseval_relative_error: f64,
    pub symmetry_error: f64,
    pub verdict: Verdict,
}

pub fn field_check(field: &SpectrumField) -> FieldReport {
    let origin_error = field.origin_error();
    let parseval_relative_error = field.parseval_relative_error();
    let symmetry_error = field.symmetry_error();
    let ok = origin_error <= field.tolerance()
        && parseval_relative_error <= PARSEVAL_TOLERANCE
        && symmetry_error <= field.tolerance();
    FieldReport {
        origin_error,
        parseval_relative_error,
        symmetry_error,
        verdict: Verdict::from_bool(ok),
    }
}

/// `|{(ξ₁, ξ₂) ∈ Spec_α² : ξ₁ − ξ₂ ∈ Spec_{α²/2}}|` against `(α²/2)|Spec_α|²`.
#[derive(Clone, Debug, Serialize)]
pub struct DifferenceReport {
    pub alpha: f64,
    pub spec_size: usize,
    pub half_spec_size: usize,
    pub count: u64,
    pub bound: f64,
    pub holds: bool,
    /// Unresolved band cells in either spectrum.
    pub margin_incidents: usize,
    pub exact_resolutions: usize,
    pub verdict: Verdict,
}

pub fn spec_difference_check(
    field: &SpectrumField,
    spec: &Spectrum,
    exact: Option<&mut CyclotomicEvaluator>,
    pair_cap: u64,
    exec: Execution,
) -> Result<DifferenceReport> {
    let n = spec.len() as u64;
    if n.saturating_mul(n) > pair_cap {
        return Err(Error::cap("spectrum pairs", pair_cap, n.saturating_mul(n)));
    }
    let half_level = spec.level().half_square();
    let half = spec_at(field, &half_level, exact);
    let members = spec.vectors();
    let count: u64 = exec
        .map(&members, |a| {
            members.iter().filter(|b| half.contains(&a.sub(b))).count() as u64
        })
        .into_iter()
        .sum();
    let holds = half_level.le_times(u128::from(n) * u128::from(n), u128::from(count));
    let margin_incidents = spec.margin_flags().len() + half.margin_flags().len();
    let verdict = if margin_incidents > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(holds)
    };
    Ok(DifferenceReport {
        alpha: spec.alpha(),
        spec_size: spec.len(),
        half_spec_size: half.len(),
        count,
        bound: half_level.value() * (n * n) as f64,
        holds,
        margin_incidents,
        exact_resolutions: spec.resolved_count() + half.resolved_count(),
        verdict,
    })
}

/// Concentration of `Spec_α(I)` on a coset `η + V`.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub alpha: f64,
    #[serde(serialize_with = "coords")]
    pub eta: FpVector,
    pub v_dim: usize,
    pub hits: usize,
    /// `α² |Spec_α(I) ∩ (η + V)|`.
    pub lhs: f64,
    /// `|V| · max_x |I ∩ (x + V⊥)| / |I|`.
    pub rhs_exact: f64,
    /// `|V| · |I|^{−β}` with the measured `β`, when a profile is supplied.
    pub rhs_hyperplane: Option<f64>,
    pub max_fiber: usize,
    /// `Σ_{v∈V} |f(v)|²` for `f(v) = |I|⁻¹ S(η + v)`.
    pub energy: f64,
    pub parseval_relative_error: f64,
    pub holds: bool,
    pub margin_incidents: usize,
    pub verdict: Verdict,
}

fn coords<S: serde::Serializer>(v: &FpVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.coords())
}

pub fn subspace_concentration_check(
    field: &SpectrumField,
    spec: &Spectrum,
    eta: &FpVector,
    v: &Subspace,
    profile: Option<&InstanceProfile>,
    cap: u64,
) -> Result<ConcentrationReport> {
    let m = field.modulus();
    if v.dim() == 0 {
        return Err(Error::Precondition("concentration needs dim V > 0".into()));
    }
    if v.ambient_dim() != field.dim() || eta.dim() != field.dim() {
        return Err(Error::DimensionMismatch(
            field.dim(),
            v.ambient_dim().max(eta.dim()),
        ));
    }
    let work = v.size().saturating_mul(v.size());
    if work > cap {
        return Err(Error::cap("concentration |V|·|reps|", cap, work));
    }
    let source = field.source();
    let n = source.len();
    let pts = source.to_vectors();
    let table = CharacterTable::new(m);
    let shifts: Vec<FpVector> = v.elements().collect();
    let f: Vec<Complex64> = shifts
        .iter()
        .map(|s| exp_sum_with(&table, &pts, &eta.add(s)) / n as f64)
        .collect();
    let energy: f64 = f.iter().map(|z| z.norm_sqr()).sum();

    // f̂(r) = |V|⁻¹ Σ_v f(v) e_p(−r·v), well defined on F_p^d / V⊥
    let perp = v.perp();
    let reps = perp.coset_reps();
    let size_v = shifts.len() as f64;
    let dual_energy: f64 = reps
        .iter()
        .map(|r| {
            let z: Complex64 = shifts
                .iter()
                .zip(&f)
                .map(|(s, fv)| fv * table.e(r.dot(s)).conj())
                .sum();
            (z / size_v).norm_sqr()
        })
        .sum();
    let parseval_relative_error =
        (energy - size_v * dual_energy).abs() / energy.max(f64::MIN_POSITIVE);

    let mut fibers: HashMap<FpVector, usize> = HashMap::new();
    for x in &pts {
        *fibers.entry(perp.reduce(x)).or_default() += 1;
    }
    let max_fiber = fibers.values().copied().max().unwrap_or(0);

    let cells: Vec<FpVector> = shifts.iter().map(|s| eta.add(s)).collect();
    let hits = cells.iter().filter(|x| spec.contains(x)).count();
    let margin_incidents = cells
        .iter()
        .filter(|x| spec.is_flagged(x.rank_index()))
        .count();
    let alpha_sq = spec.level().exact() * spec.level().exact();
    let lhs_exact = &alpha_sq * BigInt::from(hits);
    let rhs = BigRational::new(
        BigInt::from(v.size()) * BigInt::from(max_fiber),
        BigInt::from(n),
    );
    let holds = lhs_exact <= rhs;
    let rhs_hyperplane = profile.map(|p| size_v * p.max_hyperplane_hit as f64 / n as f64);
    let verdict = if parseval_relative_error > PARSEVAL_TOLERANCE {
        Verdict::Fail
    } else if margin_incidents > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(holds)
    };
    Ok(ConcentrationReport {
        alpha: spec.alpha(),
        eta: eta.clone(),
        v_dim: v.dim(),
        hits,
        lhs: spec.alpha() * spec.alpha() * hits as f64,
        rhs_exact: size_v * max_fiber as f64 / n as f64,
        rhs_hyperplane,
        max_fiber,
        energy,
        parseval_relative_error,
        holds,
        margin_incidents,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{dft_full, spec_alpha, spec_alpha_exact, DftOptions};
    use crate::fp::{PointSet, PrimeModulus};

    fn set(p: u64, d: usize, pts: &[&[i64]]) -> PointSet {
        let m = PrimeModulus::new(p).unwrap();
        PointSet::new(m, d, pts.iter().map(|c| FpVector::new(m, c))).unwrap()
    }

    #[test]
    fn qr7_difference_count() {
        let f = dft_full(&set(7, 1, &[&[1], &[2], &[4]]), DftOptions::default()).unwrap();
        let s = spec_alpha(&f, 0.4).unwrap();
        let r =
            spec_difference_check(&f, &s, None, DEFAULT_PAIR_CAP, Execution::Sequential).unwrap();
        assert_eq!((r.count, r.half_spec_size), (49, 7));
        assert!((r.bound - 3.92).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(field_check(&f).verdict, Verdict::Pass);
    }

    #[test]
    fn trivial_spectrum_counts_one_pair() {
        let f = dft_full(&set(7, 1, &[&[1], &[2], &[4]]), DftOptions::default()).unwrap();
        let s = spec_alpha_exact(&f, 0.9).unwrap();
        let r = spec_difference_check(&f, &s, None, 10, Execution::Sequential).unwrap();
        assert_eq!((r.spec_size, r.count), (1, 1));
        assert!(r.holds);
    }

    #[test]
    fn cross_orbit_fibers() {
        let m = PrimeModulus::new(5).unwrap();
        let pts = set(5, 2, &[&[1, 0], &[0, 1], &[4, 0], &[0, 4]]);
        let f = dft_full(&pts, DftOptions::default()).unwrap();
        let s = spec_alpha(&f, 0.3).unwrap();
        let v = Subspace::span(m, 2, &[FpVector::new(m, &[1, 0])]).unwrap();
        let r = subspace_concentration_check(
            &f,
            &s,
            &FpVector::zero(m, 2),
            &v,
            None,
            DEFAULT_CONCENTRATION_CAP,
        )
        .unwrap();
        // V⊥ = span{(0,1)}: fibers are x₁ = 0 (two points), x₁ = 1, x₁ = 4
        assert_eq!(r.max_fiber, 2);
        assert!((r.rhs_exact - 2.5).abs() < 1e-12);
        assert!(r.parseval_relative_error < 1e-9);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn full_line_in_one_dimension() {
        let m = PrimeModulus::new(11).unwrap();
        let pts = set(11, 1, &[&[1], &[3], &[4], &[5], &[9]]);
        let f = dft_full(&pts, DftOptions::default()).unwrap();
        let s = spec_alpha_exact(&f, 0.2).unwrap();
        let r = subspace_concentration_check(
            &f,
            &s,
            &FpVector::zero(m, 1),
            &Subspace::full(m, 1),
            None,
            1000,
        )
        .unwrap();
        assert_eq!(r.max_fiber, 1);
        assert!((r.rhs_exact - 11.0 / 5.0).abs() < 1e-12);
        assert_eq!(r.hits, s.len());
        assert!(r.holds);
        assert!(subspace_concentration_check(
            &f,
            &s,
            &FpVector::zero(m, 1),
            &Subspace::zero(m, 1),
            None,
            1000
        )
        .is_err());
    }
}
