use std::fmt;

use smallvec::SmallVec;

use super::PrimeModulus;

pub(crate) type Coords = SmallVec<[u32; 4]>;

/// A vector in `F_p^d` with canonical coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    modulus: PrimeModulus,
    coords: Coords,
}

impl FpVector {
    pub fn new(modulus: PrimeModulus, coords: &[i64]) -> Self {
        Self {
            modulus,
            coords: coords.iter().map(|&c| modulus.reduce(c)).collect(),
        }
    }

    pub(crate) fn from_reduced(modulus: PrimeModulus, coords: Coords) -> Self {
        debug_assert!(coords.iter().all(|&c| c < modulus.get()));
        Self { modulus, coords }
    }

    pub fn zero(modulus: PrimeModulus, d: usize) -> Self {
        Self {
            modulus,
            coords: SmallVec::from_elem(0, d),
        }
    }

    /// The `i`-th standard basis vector.
    pub fn basis(modulus: PrimeModulus, d: usize, i: usize) -> Self {
        let mut v = Self::zero(modulus, d);
        v.coords[i] = 1;
        v
    }

    /// Inverse of [`FpVector::rank_index`].
    pub fn from_index(modulus: PrimeModulus, d: usize, mut index: u64) -> Self {
        let p = modulus.as_u64();
        let mut coords: Coords = SmallVec::from_elem(0, d);
        for c in coords.iter_mut().rev() {
            *c = (index % p) as u32;
            index /= p;
        }
        Self { modulus, coords }
    }

    /// Lexicographic rank `Σ c_i p^(d-1-i)`; callers guarantee `p^d` fits.
    pub fn rank_index(&self) -> u64 {
        let p = self.modulus.as_u64();
        self.coords.iter().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &Self) -> u32 {
        debug_assert_eq!(self.dim(), other.dim());
        let p = self.modulus.as_u64();
        let s = self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
        s as u32
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.modulus;
        Self {
            modulus: m,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| m.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.modulus;
        Self {
            modulus: m,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| m.sub(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self {
            modulus: m,
            coords: self.coords.iter().map(|&a| m.neg(a)).collect(),
        }
    }

    pub fn scale(&self, s: u32) -> Self {
        let m = self.modulus;
        Self {
            modulus: m,
            coords: self.coords.iter().map(|&a| m.mul(a, s)).collect(),
        }
    }

    /// Scales so that the first nonzero coordinate is 1. Zero stays zero.
    pub fn normalized(&self) -> Self {
        match self.coords.iter().find(|&&c| c != 0) {
            Some(&lead) => self.scale(self.modulus.inv(lead).expect("nonzero")),
            None => self.clone(),
        }
    }
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords.as_slice())
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Every vector of `F_p^d`, in rank order.
pub fn all_vectors(modulus: PrimeModulus, d: usize) -> impl Iterator<Item = FpVector> {
    let n = modulus.space_size(d).expect("space size overflows u64");
    (0..n).map(move |i| FpVector::from_index(modulus, d, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_index_round_trips() {
        let p = PrimeModulus::new(7).unwrap();
        for i in 0..343 {
            assert_eq!(FpVector::from_index(p, 3, i).rank_index(), i);
        }
        assert_eq!(FpVector::new(p, &[1, 0]).rank_index(), 7);
    }

    #[test]
    fn normalization_picks_class_representative() {
        let p = PrimeModulus::new(5).unwrap();
        let v = FpVector::new(p, &[0, 3, 1]);
        assert_eq!(v.normalized().coords(), &[0, 1, 2]);
        assert!(FpVector::zero(p, 2).normalized().is_zero());
    }

    #[test]
    fn arithmetic_reduces() {
        let p = PrimeModulus::new(5).unwrap();
        let a = FpVector::new(p, &[-1, 7]);
        assert_eq!(a.coords(), &[4, 2]);
        let b = FpVector::new(p, &[3, 3]);
        assert_eq!(a.add(&b).coords(), &[2, 0]);
        assert_eq!(a.sub(&b).coords(), &[1, 4]);
        assert_eq!(a.dot(&b), (12 + 6) % 5);
        assert!(a.add(&a.neg()).is_zero());
    }
}
