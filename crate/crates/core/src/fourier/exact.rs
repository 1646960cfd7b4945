//! Exact comparison of `|S(ξ)|²` with a rational threshold.
//!
//! `S(ξ) = Σ_k c_k ζ^k` with `c_k = #{x ∈ I : ξ·x = k}` and `ζ = e^{2πi/p}`, so
//! `|S(ξ)|² = Σ_m a_m ζ^m` with integer autocorrelations `a_m = Σ_j c_j c_{j−m}`.
//! The only linear relation among `1, ζ, …, ζ^{p−1}` is `Σ ζ^m = 0`, hence
//! `|S|²` is rational iff `a_1 = … = a_{p−1}`, in which case it equals `a_0 − a_1`.
//! Otherwise `|S|²` is irrational and its sign against the threshold is read off a
//! high-precision evaluation.

use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::fp::{FpVector, PrimeModulus};

/// Largest prime for which the exact mode is offered.
pub const EXACT_MAX_P: u32 = 61;

/// Working precision in bits.
pub const EXACT_PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct CyclotomicEvaluator {
    modulus: PrimeModulus,
    cosines: Vec<BigFloat>,
    consts: Consts,
}

impl CyclotomicEvaluator {
    pub fn new(modulus: PrimeModulus) -> Result<Self> {
        if modulus.get() > EXACT_MAX_P {
            return Err(Error::InvalidArgument(format!(
                "exact mode supports p ≤ {EXACT_MAX_P}, got {modulus}"
            )));
        }
        let mut consts = Consts::new().map_err(|e| Error::InvalidArgument(format!("{e:?}")))?;
        let prec = EXACT_PRECISION + 64;
        let pi = consts.pi(prec, RM);
        let p = modulus.get() as u64;
        let two_pi_over_p = pi.mul(&BigFloat::from_u64(2, prec), prec, RM).div(
            &BigFloat::from_u64(p, prec),
            prec,
            RM,
        );
        let cosines = (0..p)
            .map(|m| {
                two_pi_over_p
                    .mul(&BigFloat::from_u64(m, prec), prec, RM)
                    .cos(prec, RM, &mut consts)
            })
            .collect();
        Ok(Self {
            modulus,
            cosines,
            consts,
        })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// Autocorrelation coefficients `a_m`, `m ∈ [0, p)`.
    pub fn norm_sq_coefficients(&self, points: &[FpVector], xi: &FpVector) -> Vec<i128> {
        let p = self.modulus.get() as usize;
        let mut counts = vec![0i128; p];
        for x in points {
            counts[xi.dot(x) as usize] += 1;
        }
        (0..p)
            .map(|m| (0..p).map(|j| counts[j] * counts[(j + p - m) % p]).sum())
            .collect()
    }

    /// `|S(ξ)|²` as a rational when it is one.
    pub fn rational_norm_sq(coeffs: &[i128]) -> Option<i128> {
        let first = *coeffs.get(1)?;
        coeffs[1..]
            .iter()
            .all(|&a| a == first)
            .then(|| coeffs[0] - first)
    }

    /// Ordering of `|S(ξ)|²` against `threshold`; `None` if the high-precision
    /// difference is below the working precision.
    pub fn compare_norm_sq(
        &mut self,
        points: &[FpVector],
        xi: &FpVector,
        threshold: &BigRational,
    ) -> Option<Ordering> {
        let coeffs = self.norm_sq_coefficients(points, xi);
        let single = coeffs.len() == 1;
        if single {
            return Some(BigRational::from_integer(BigInt::from(coeffs[0])).cmp(threshold));
        }
        if let Some(v) = Self::rational_norm_sq(&coeffs) {
            return Some(BigRational::from_integer(BigInt::from(v)).cmp(threshold));
        }
        let prec = EXACT_PRECISION + 64;
        let value = coeffs
            .iter()
            .zip(&self.cosines)
            .fold(BigFloat::from_u64(0, prec), |acc, (&a, c)| {
                acc.add(&BigFloat::from_i128(a, prec).mul(c, prec, RM), prec, RM)
            });
        let numer = self.big(threshold.numer());
        let denom = self.big(threshold.denom());
        let diff = value.mul(&denom, prec, RM).sub(&numer, prec, RM);
        let scale = coeffs.iter().map(|a| a.unsigned_abs() as f64).sum::<f64>()
            * threshold.denom().to_f64().unwrap_or(f64::MAX)
            + threshold.numer().abs().to_f64().unwrap_or(f64::MAX);
        let floor = BigFloat::from_f64(scale.max(1.0), prec).mul(
            &BigFloat::from_f64(2f64.powi(-(EXACT_PRECISION as i32 - 32)), prec),
            prec,
            RM,
        );
        if diff.abs().cmp(&floor).is_none_or(|c| c <= 0) {
            return None;
        }
        Some(if diff.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        })
    }

    fn big(&mut self, n: &BigInt) -> BigFloat {
        let prec = EXACT_PRECISION + 64;
        match n.to_i128() {
            Some(v) => BigFloat::from_i128(v, prec),
            None => BigFloat::parse(&n.to_string(), Radix::Dec, prec, RM, &mut self.consts),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn qr7_is_exactly_two() {
        let p = m(7);
        let pts: Vec<FpVector> = [1, 2, 4].iter().map(|&c| FpVector::new(p, &[c])).collect();
        let ev = CyclotomicEvaluator::new(p).unwrap();
        let coeffs = ev.norm_sq_coefficients(&pts, &FpVector::new(p, &[1]));
        assert_eq!(CyclotomicEvaluator::rational_norm_sq(&coeffs), Some(2));
    }

    #[test]
    fn ties_are_decided_exactly() {
        let p = m(7);
        let pts: Vec<FpVector> = [1, 2, 4].iter().map(|&c| FpVector::new(p, &[c])).collect();
        let mut ev = CyclotomicEvaluator::new(p).unwrap();
        let xi = FpVector::new(p, &[3]);
        let two = BigRational::from_integer(2.into());
        assert_eq!(ev.compare_norm_sq(&pts, &xi, &two), Some(Ordering::Equal));
        let just_below = BigRational::new(1999999999.into(), 1000000000.into());
        assert_eq!(
            ev.compare_norm_sq(&pts, &xi, &just_below),
            Some(Ordering::Greater)
        );
    }

    #[test]
    fn irrational_values_are_ordered() {
        // {0, 1} ⊂ F_5: |S(1)|² = 2 + 2cos(2π/5) = 2.618…, irrational
        let p = m(5);
        let pts: Vec<FpVector> = [0, 1].iter().map(|&c| FpVector::new(p, &[c])).collect();
        let mut ev = CyclotomicEvaluator::new(p).unwrap();
        let xi = FpVector::new(p, &[1]);
        let golden_sq = (1.0 + 5f64.sqrt()) / 2.0 + 1.0;
        let below = BigRational::from_float(golden_sq - 1e-14).unwrap();
        let above = BigRational::from_float(golden_sq + 1e-14).unwrap();
        assert_eq!(
            ev.compare_norm_sq(&pts, &xi, &below),
            Some(Ordering::Greater)
        );
        assert_eq!(ev.compare_norm_sq(&pts, &xi, &above), Some(Ordering::Less));
    }

    #[test]
    fn large_primes_rejected() {
        assert!(CyclotomicEvaluator::new(m(67)).is_err());
    }
}
