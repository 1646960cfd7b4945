use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier::{spec_at, CyclotomicEvaluator, Level, Spectrum, SpectrumField, EXACT_MAX_P};
use crate::fp::FpVector;
use crate::group::{AffineElement, OrbitSet};
use crate::Verdict;

#[derive(Clone, Copy, Debug)]
pub struct IterationOptions {
    /// Resolve band cells with the cyclotomic evaluator when `p` allows it.
    pub exact: bool,
    /// Check every element of `E_j` when `|E_j|` is at most this.
    pub full_limit: u128,
    /// Sampled elements of `E_j` otherwise.
    pub samples: usize,
    pub seed: u64,
    /// Bound on `|Spec_{α_j}|²` pair enumeration.
    pub pair_cap: u64,
    pub exec: Execution,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            exact: true,
            full_limit: 1_000_000,
            samples: 10_000,
            seed: 0,
            pair_cap: 100_000_000,
            exec: Execution::Parallel,
        }
    }
}

/// The `α_j` ladder and the pigeonhole rung.
#[derive(Clone, Debug, Serialize)]
pub struct IterationSchedule {
    pub eps_prime: f64,
    /// `J = ⌈2d/ε′⌉`.
    pub j_max: u32,
    /// `ε₀ = ε′ / 2^J`.
    pub eps0: f64,
    /// `α_0, …` for the rungs actually computed.
    pub alphas: Vec<f64>,
    pub spec_sizes: Vec<usize>,
    pub chosen_j: Option<usize>,
    /// `c = 2^j` at the chosen rung.
    pub c: Option<f64>,
    /// `φ = α_j` at the chosen rung.
    pub phi: Option<f64>,
    /// Largest relative gap between the ladder and `2^{1−2^j} p^{−2^j ε₀}`.
    pub closed_form_error: f64,
}

/// `F_j` and the implicit `E_j = ⊔_{(ξ₁,ξ₂)∈F_j} E_{(ξ₁,ξ₂)}`.
#[derive(Clone, Debug, Serialize)]
pub struct PairCertificate {
    pub j: usize,
    /// Rank indices `(ξ₁, ξ₂)`.
    #[serde(skip)]
    pub pairs: Vec<(u64, u64)>,
    pub f_count: u64,
    pub group_order: usize,
    /// `|E_j| = |F_j| |H|²`.
    pub e_count: u128,
    /// `|A_{α_j}| = |H| |Spec_{α_j}|`.
    pub a_size: u128,
    /// `(α_j²/2) |A_{α_j}|²` in floating point; the comparison itself is exact.
    pub bound: f64,
    pub bound_holds: bool,
    /// `|F_j| ≥ (α_j²/2) |Spec_{α_j}|²`.
    pub lemma_holds: bool,
    pub full_check: bool,
    pub checked: u64,
    pub violations: u64,
    pub recover_failures: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationReport {
    pub schedule: IterationSchedule,
    pub certificate: Option<PairCertificate>,
    pub nested: bool,
    pub margin_incidents: usize,
    pub verdict: Verdict,
}

/// Ladder `α_0 = p^{−ε₀}`, `α_{j+1} = α_j²/2`, spectra up to the first `j < J` with
/// `|Spec_{α_{j+1}}| ≤ p^{d/J} |Spec_{α_j}|`, and the certificate at that `j`.
pub fn prop_p_iteration(
    orbit: &OrbitSet,
    field: &SpectrumField,
    eps_prime: f64,
    opts: IterationOptions,
) -> Result<IterationReport> {
    if !(eps_prime > 0.0 && eps_prime <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "ε′ must lie in (0, 1], got {eps_prime}"
        )));
    }
    if !orbit.transposed() {
        return Err(Error::Precondition(
            "the iteration needs an H^T v orbit so that spectra are H-invariant".into(),
        ));
    }
    if orbit.points() != field.source() {
        return Err(Error::Precondition(
            "field was not computed from this orbit".into(),
        ));
    }
    let group = orbit.group();
    let m = field.modulus();
    let d = field.dim();
    let p = m.as_u64() as f64;
    let j_max = (2.0 * d as f64 / eps_prime).ceil() as u32;
    let eps0 = eps_prime / 2f64.powi(j_max as i32);
    let alpha0 = p.powf(-eps0);
    if !(alpha0 < 1.0 && eps0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ε′ = {eps_prime} is too small to represent α_0 < 1"
        )));
    }

    let mut evaluator = if opts.exact && m.get() <= EXACT_MAX_P {
        Some(CyclotomicEvaluator::new(m)?)
    } else {
        None
    };
    let mut levels = vec![Level::binary(alpha0)?];
    let mut spectra: Vec<Spectrum> = vec![spec_at(field, &levels[0], evaluator.as_mut())];
    let space = BigUint::from(m.space_size(d).expect("field exists"));
    let mut chosen = None;
    for j in 0..j_max as usize {
        let next = levels[j].half_square();
        spectra.push(spec_at(field, &next, evaluator.as_mut()));
        levels.push(next);
        let lhs = BigUint::from(spectra[j + 1].len()).pow(j_max);
        let rhs = &space * BigUint::from(spectra[j].len()).pow(j_max);
        if lhs <= rhs {
            chosen = Some(j);
            break;
        }
    }

    let closed_form = |j: usize| -> f64 {
        let c = 2f64.powi(j as i32);
        ((1.0 - c) * std::f64::consts::LN_2 - c * eps0 * p.ln()).exp()
    };
    let closed_form_error = levels
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let want = closed_form(j);
            if want > 0.0 {
                (l.value() - want).abs() / want
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    let nested = spectra
        .windows(2)
        .all(|w| w[0].indices().all(|i| w[1].contains_index(i)));
    let schedule = IterationSchedule {
        eps_prime,
        j_max,
        eps0,
        alphas: levels.iter().map(Level::value).collect(),
        spec_sizes: spectra.iter().map(Spectrum::len).collect(),
        chosen_j: chosen,
        c: chosen.map(|j| 2f64.powi(j as i32)),
        phi: chosen.map(|j| levels[j].value()),
        closed_form_error,
    };

    let Some(j) = chosen else {
        let margin_incidents = spectra.iter().map(|s| s.margin_flags().len()).sum();
        return Ok(IterationReport {
            schedule,
            certificate: None,
            nested,
            margin_incidents,
            verdict: Verdict::Fail,
        });
    };
    let margin_incidents = spectra[j].margin_flags().len() + spectra[j + 1].margin_flags().len();
    let certificate = certify(group, &spectra[j], &spectra[j + 1], &levels[j], j, opts)?;
    let ok = nested
        && certificate.bound_holds
        && certificate.lemma_holds
        && certificate.violations == 0
        && certificate.recover_failures == 0;
    let verdict = if margin_incidents > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(ok)
    };
    Ok(IterationReport {
        schedule,
        certificate: Some(certificate),
        nested,
        margin_incidents,
        verdict,
    })
}

fn certify(
    group: &crate::group::MatrixGroup,
    spec: &Spectrum,
    next: &Spectrum,
    level: &Level,
    j: usize,
    opts: IterationOptions,
) -> Result<PairCertificate> {
    let n = spec.len() as u64;
    if n.saturating_mul(n) > opts.pair_cap {
        return Err(Error::cap(
            "spectrum pairs",
            opts.pair_cap,
            n.saturating_mul(n),
        ));
    }
    let m = spec.modulus();
    let d = spec.dim();
    let members = spec.vectors();
    let pairs: Vec<(u64, u64)> = opts
        .exec
        .map(&members, |a| {
            members
                .iter()
                .filter(|b| next.contains(&a.sub(b)))
                .map(|b| (a.rank_index(), b.rank_index()))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    let f_count = pairs.len() as u64;
    let h = group.order() as u128;
    let e_count = f_count as u128 * h * h;
    let a_size = h * n as u128;
    let half = level.half_square();
    let bound_holds = half.le_times(a_size * a_size, e_count);
    let lemma_holds = half.le_times(n as u128 * n as u128, f_count as u128);

    let hs: Vec<_> = group.iter().cloned().collect();
    let h_inv: Vec<_> = hs
        .iter()
        .map(|g| g.inverse().expect("group elements are invertible"))
        .collect();
    let in_a =
        |g: &AffineElement, s: &Spectrum| group.contains(g.linear()) && s.contains(g.translation());
    let check = |pair: usize, i1: usize, i2: usize| -> (bool, bool) {
        let (k1, k2) = pairs[pair];
        let xi1 = FpVector::from_index(m, d, k1);
        let xi2 = FpVector::from_index(m, d, k2);
        let n1 = AffineElement::new(hs[i1].clone(), xi1.clone()).expect("H ≤ GL_d");
        let n2 = AffineElement::new(hs[i2].clone(), h_inv[i1].apply(&xi2).neg()).expect("H ≤ GL_d");
        let contained = in_a(&n1, spec) && in_a(&n2, spec) && in_a(&n1.mul(&n2), next);
        let r1 = n1.translation().clone();
        let r2 = n1.linear().apply(n2.translation()).neg();
        (contained, r1 == xi1 && r2 == xi2)
    };
    let full_check = e_count <= opts.full_limit;
    let hn = hs.len();
    let outcomes: Vec<(bool, bool)> = if full_check {
        opts.exec
            .map_range(pairs.len(), |k| {
                let mut v = Vec::with_capacity(hn * hn);
                for i1 in 0..hn {
                    for i2 in 0..hn {
                        v.push(check(k, i1, i2));
                    }
                }
                v
            })
            .into_iter()
            .flatten()
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let draws: Vec<(usize, usize, usize)> = (0..opts.samples)
            .map(|_| {
                (
                    rng.gen_range(0..pairs.len()),
                    rng.gen_range(0..hn),
                    rng.gen_range(0..hn),
                )
            })
            .collect();
        opts.exec.map(&draws, |&(k, i1, i2)| check(k, i1, i2))
    };
    Ok(PairCertificate {
        j,
        f_count,
        group_order: group.order(),
        e_count,
        a_size,
        bound: half.value() * (a_size as f64).powi(2),
        bound_holds,
        lemma_holds,
        full_check,
        checked: outcomes.len() as u64,
        violations: outcomes.iter().filter(|o| !o.0).count() as u64,
        recover_failures: outcomes.iter().filter(|o| !o.1).count() as u64,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fourier::{dft_full, DftOptions};
    use crate::fp::{FpMatrix, PrimeModulus};
    use crate::group::MatrixGroup;

    fn qr_instance(p: u64) -> (OrbitSet, SpectrumField) {
        let m = PrimeModulus::new(p).unwrap();
        let g = m.primitive_root() as i64;
        let h = Arc::new(
            MatrixGroup::generate(m, 1, &[FpMatrix::new(m, 1, &[g * g]).unwrap()], 100).unwrap(),
        );
        let orbit = OrbitSet::compute(h, &FpVector::new(m, &[1]), true).unwrap();
        let field = dft_full(orbit.points(), DftOptions::default()).unwrap();
        (orbit, field)
    }

    #[test]
    fn ladder_arithmetic() {
        let (orbit, field) = qr_instance(11);
        let r = prop_p_iteration(&orbit, &field, 0.5, IterationOptions::default()).unwrap();
        assert_eq!(r.schedule.j_max, 4);
        assert_eq!(r.schedule.eps0, 0.03125);
        assert!(r.schedule.closed_form_error < 1e-12);
        for w in r.schedule.alphas.windows(2) {
            assert!((w[1] - w[0] * w[0] / 2.0).abs() <= 1e-15 * w[1]);
        }
    }

    #[test]
    fn qr11_certificate() {
        let (orbit, field) = qr_instance(11);
        let r = prop_p_iteration(&orbit, &field, 0.5, IterationOptions::default()).unwrap();
        let j = r.schedule.chosen_j.unwrap();
        assert!(j < 4);
        let c = r.certificate.unwrap();
        assert!(c.full_check && c.bound_holds && c.lemma_holds);
        assert_eq!(c.e_count, c.f_count as u128 * 25);
        assert_eq!(c.checked as u128, c.e_count);
        assert_eq!((c.violations, c.recover_failures), (0, 0));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn sampled_certificate_agrees() {
        let (orbit, field) = qr_instance(11);
        let opts = IterationOptions {
            full_limit: 0,
            samples: 500,
            ..IterationOptions::default()
        };
        let r = prop_p_iteration(&orbit, &field, 0.5, opts).unwrap();
        let c = r.certificate.unwrap();
        assert!(!c.full_check);
        assert_eq!((c.checked, c.violations), (500, 0));
    }

    #[test]
    fn bad_inputs() {
        let (orbit, field) = qr_instance(7);
        assert!(prop_p_iteration(&orbit, &field, 0.0, IterationOptions::default()).is_err());
        assert!(prop_p_iteration(&orbit, &field, 1.5, IterationOptions::default()).is_err());
        let plain = OrbitSet::compute(orbit.group().clone(), orbit.base_point(), false).unwrap();
        assert!(prop_p_iteration(&plain, &field, 0.5, IterationOptions::default()).is_err());
    }
}
