use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::fp::{FpVector, PointSet, PrimeModulus};

/// `e_p(k) = e^{2πik/p}` for `k ∈ [0, p)`, evaluated once per residue.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    values: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(modulus: PrimeModulus) -> Self {
        let p = modulus.get() as usize;
        Self {
            values: (0..p)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / p as f64))
                .collect(),
        }
    }

    #[inline]
    pub fn e(&self, k: u32) -> Complex64 {
        self.values[k as usize]
    }
}

/// `Σ_{x∈I} e_p(ξ·x)` as a complex number.
pub fn exp_sum_complex(points: &PointSet, xi: &FpVector) -> Complex64 {
    let table = CharacterTable::new(points.modulus());
    exp_sum_with(&table, &points.to_vectors(), xi)
}

pub(crate) fn exp_sum_with(
    table: &CharacterTable,
    points: &[FpVector],
    xi: &FpVector,
) -> Complex64 {
    points.iter().map(|x| table.e(xi.dot(x))).sum()
}

/// `|Σ_{x∈I} e_p(ξ·x)|`.
pub fn exp_sum(points: &PointSet, xi: &FpVector) -> f64 {
    exp_sum_complex(points, xi).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: PrimeModulus, d: usize, pts: &[&[i64]]) -> PointSet {
        PointSet::new(m, d, pts.iter().map(|c| FpVector::new(m, c))).unwrap()
    }

    #[test]
    fn zero_frequency_counts_points() {
        let m = PrimeModulus::new(11).unwrap();
        let s = set(m, 2, &[&[1, 2], &[3, 4], &[5, 7]]);
        assert!((exp_sum(&s, &FpVector::zero(m, 2)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_residues_mod_seven() {
        let m = PrimeModulus::new(7).unwrap();
        let s = set(m, 1, &[&[1], &[2], &[4]]);
        // brute-force oracle by direct trigonometric summation
        let brute = {
            let (re, im) = [1.0f64, 2.0, 4.0].iter().fold((0.0, 0.0), |(a, b), x| {
                (a + (TAU * x / 7.0).cos(), b + (TAU * x / 7.0).sin())
            });
            (re * re + im * im).sqrt()
        };
        let got = exp_sum(&s, &FpVector::new(m, &[1]));
        assert!((got - brute).abs() < 1e-12);
        assert!((got - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn full_line_cancels() {
        let m = PrimeModulus::new(13).unwrap();
        let s = PointSet::new(m, 1, (0..13).map(|c| FpVector::new(m, &[c]))).unwrap();
        for k in 1..13 {
            assert!(exp_sum(&s, &FpVector::new(m, &[k])) < 1e-12);
        }
    }
}
