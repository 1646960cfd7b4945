use std::fmt;

use smallvec::SmallVec;

use super::{FpVector, PrimeModulus};
use crate::error::{Error, Result};

type Entries = SmallVec<[u32; 9]>;

/// A square `d×d` matrix over `F_p`, row-major, with a cached invertibility flag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    modulus: PrimeModulus,
    dim: usize,
    entries: Entries,
    invertible: bool,
}

impl FpMatrix {
    /// Builds a matrix from row-major entries (any integers, reduced mod p).
    pub fn new(modulus: PrimeModulus, dim: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        let entries: Entries = entries.iter().map(|&e| modulus.reduce(e)).collect();
        Ok(Self::from_entries(modulus, dim, entries))
    }

    pub fn from_rows(modulus: PrimeModulus, rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(r.len(), dim));
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(modulus, dim, &flat)
    }

    fn from_entries(modulus: PrimeModulus, dim: usize, entries: Entries) -> Self {
        let mut m = Self {
            modulus,
            dim,
            entries,
            invertible: false,
        };
        m.invertible = m.determinant() != 0;
        m
    }

    /// Reduced entries of a matrix already known to be invertible.
    pub(crate) fn from_invertible(modulus: PrimeModulus, dim: usize, entries: &[u32]) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self {
            modulus,
            dim,
            entries: entries.iter().copied().collect(),
            invertible: true,
        }
    }

    pub fn identity(modulus: PrimeModulus, dim: usize) -> Self {
        let mut entries: Entries = SmallVec::from_elem(0, dim * dim);
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Self {
            modulus,
            dim,
            entries,
            invertible: true,
        }
    }

    pub fn diagonal(modulus: PrimeModulus, diag: &[i64]) -> Self {
        let dim = diag.len();
        let mut entries: Entries = SmallVec::from_elem(0, dim * dim);
        for (i, &a) in diag.iter().enumerate() {
            entries[i * dim + i] = modulus.reduce(a);
        }
        Self::from_entries(modulus, dim, entries)
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.entry(i, j) == u32::from(i == j)))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.mul(other))
    }

    /// Product without shape checks; operands must share modulus and dimension.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(self.check_same_shape(other).is_ok());
        let d = self.dim;
        let p = self.modulus.as_u64();
        let mut entries: Entries = SmallVec::from_elem(0, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    acc = (acc + self.entries[i * d + k] as u64 * other.entries[k * d + j] as u64)
                        % p;
                }
                entries[i * d + j] = acc as u32;
            }
        }
        let invertible = self.invertible && other.invertible;
        Self {
            modulus: self.modulus,
            dim: d,
            entries,
            invertible,
        }
    }

    pub fn try_apply(&self, v: &FpVector) -> Result<FpVector> {
        if self.modulus != v.modulus() {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                v.modulus().get(),
            ));
        }
        if self.dim != v.dim() {
            return Err(Error::DimensionMismatch(self.dim, v.dim()));
        }
        Ok(self.apply(v))
    }

    /// Matrix–vector product `M v`.
    pub fn apply(&self, v: &FpVector) -> FpVector {
        let d = self.dim;
        let p = self.modulus.as_u64();
        let x = v.coords();
        let coords = (0..d)
            .map(|i| {
                (0..d).fold(0u64, |acc, k| {
                    (acc + self.entries[i * d + k] as u64 * x[k] as u64) % p
                }) as u32
            })
            .collect();
        FpVector::from_reduced(self.modulus, coords)
    }

    /// `M^T v` without materializing the transpose.
    pub fn apply_transpose(&self, v: &FpVector) -> FpVector {
        let d = self.dim;
        let p = self.modulus.as_u64();
        let x = v.coords();
        let coords = (0..d)
            .map(|j| {
                (0..d).fold(0u64, |acc, k| {
                    (acc + self.entries[k * d + j] as u64 * x[k] as u64) % p
                }) as u32
            })
            .collect();
        FpVector::from_reduced(self.modulus, coords)
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let entries = (0..d * d)
            .map(|idx| self.entries[(idx % d) * d + idx / d])
            .collect();
        Self {
            modulus: self.modulus,
            dim: d,
            entries,
            invertible: self.invertible,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| m.sub(a, b))
            .collect();
        Self::from_entries(m, self.dim, entries)
    }

    pub fn determinant(&self) -> u32 {
        let d = self.dim;
        let m = self.modulus;
        let mut a: Vec<u32> = self.entries.to_vec();
        let mut det = 1u32;
        for col in 0..d {
            let Some(pivot) = (col..d).find(|&r| a[r * d + col] != 0) else {
                return 0;
            };
            if pivot != col {
                for j in 0..d {
                    a.swap(pivot * d + j, col * d + j);
                }
                det = m.neg(det);
            }
            let pv = a[col * d + col];
            det = m.mul(det, pv);
            let inv = m.inv(pv).expect("nonzero pivot");
            for r in col + 1..d {
                let f = m.mul(a[r * d + col], inv);
                if f == 0 {
                    continue;
                }
                for j in col..d {
                    a[r * d + j] = m.sub(a[r * d + j], m.mul(f, a[col * d + j]));
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.invertible {
            return Err(Error::SingularMatrix);
        }
        let d = self.dim;
        let m = self.modulus;
        let w = 2 * d;
        let mut a = vec![0u32; d * w];
        for i in 0..d {
            for j in 0..d {
                a[i * w + j] = self.entry(i, j);
            }
            a[i * w + d + i] = 1;
        }
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| a[r * w + col] != 0)
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for j in 0..w {
                    a.swap(pivot * w + j, col * w + j);
                }
            }
            let inv = m.inv(a[col * w + col]).expect("nonzero pivot");
            for j in 0..w {
                a[col * w + j] = m.mul(a[col * w + j], inv);
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[r * w + col];
                if f == 0 {
                    continue;
                }
                for j in 0..w {
                    a[r * w + j] = m.sub(a[r * w + j], m.mul(f, a[col * w + j]));
                }
            }
        }
        let entries = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| a[i * w + d + j])
            .collect();
        Ok(Self {
            modulus: m,
            dim: d,
            entries,
            invertible: true,
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.modulus, self.dim);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:?}", &self.entries[i * self.dim..(i + 1) * self.dim])?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn diagonal_inverse() {
        let a = FpMatrix::from_rows(p(5), &[vec![2, 0], vec![0, 3]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(
            inv,
            FpMatrix::from_rows(p(5), &[vec![3, 0], vec![0, 2]]).unwrap()
        );
        assert!(a.mul(&inv).is_identity());
    }

    #[test]
    fn identity_action() {
        let v = FpVector::new(p(7), &[3, 4]);
        assert_eq!(FpMatrix::identity(p(7), 2).apply(&v), v);
    }

    #[test]
    fn shear_and_its_transpose() {
        let a = FpMatrix::from_rows(p(5), &[vec![1, 1], vec![0, 1]]).unwrap();
        let e1 = FpVector::new(p(5), &[1, 0]);
        assert_eq!(a.apply(&e1).coords(), &[1, 0]);
        assert_eq!(a.transpose().apply(&e1).coords(), &[1, 1]);
        assert_eq!(a.apply_transpose(&e1).coords(), &[1, 1]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn singular_matrix_errors() {
        let a = FpMatrix::from_rows(p(7), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(!a.is_invertible());
        assert_eq!(a.inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn modulus_mismatch_is_reported() {
        let a = FpMatrix::identity(p(5), 2);
        let b = FpMatrix::identity(p(7), 2);
        assert_eq!(a.try_mul(&b), Err(Error::ModulusMismatch(5, 7)));
        let v = FpVector::new(p(5), &[1, 2, 3]);
        assert_eq!(a.try_apply(&v), Err(Error::DimensionMismatch(2, 3)));
    }

    #[test]
    fn determinant_of_permutation() {
        let a = FpMatrix::from_rows(p(5), &[vec![0, 4], vec![1, 0]]).unwrap();
        assert_eq!(a.determinant(), 1);
        assert!(a
            .pow(2)
            .sub(&FpMatrix::diagonal(p(5), &[-1, -1]))
            .entries()
            .iter()
            .all(|&e| e == 0));
        assert!(a.pow(4).is_identity());
    }
}
