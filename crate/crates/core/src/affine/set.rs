use std::collections::HashSet;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{FpMatrix, FpVector, PointSet, PrimeModulus};
use crate::group::{AffineElement, MatrixGroup};

/// Default bound on the size of any materialized affine set.
pub const DEFAULT_SET_CAP: usize = 5_000_000;

/// Default bound on the number of multiplications in one product.
pub const DEFAULT_WORK_CAP: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetCaps {
    pub max_elements: usize,
    pub max_work: u64,
}

impl Default for SetCaps {
    fn default() -> Self {
        Self {
            max_elements: DEFAULT_SET_CAP,
            max_work: DEFAULT_WORK_CAP,
        }
    }
}

/// Bijection between `Aff_d(F_p)` elements and integers: the linear part's entries,
/// then the translation, read as base-`p` digits. Keys with the same linear part
/// are contiguous, so fibers `R_M` are ranges of a sorted key list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Codec {
    modulus: PrimeModulus,
    dim: usize,
    fiber: u128,
}

impl Codec {
    pub(crate) fn new(modulus: PrimeModulus, dim: usize) -> Result<Self> {
        let p = modulus.as_u64() as u128;
        let digits = (dim * dim + dim) as u32;
        p.checked_pow(digits).ok_or_else(|| {
            Error::InvalidArgument(format!("Aff_{dim}(F_{modulus}) is too large to index"))
        })?;
        Ok(Self {
            modulus,
            dim,
            fiber: p.pow(dim as u32),
        })
    }

    pub(crate) fn encode(&self, g: &AffineElement) -> u128 {
        let p = self.modulus.as_u64() as u128;
        let digits = g.linear().entries().iter().chain(g.translation().coords());
        digits.fold(0u128, |acc, &c| acc * p + c as u128)
    }

    pub(crate) fn encode_linear(&self, m: &FpMatrix) -> u128 {
        let p = self.modulus.as_u64() as u128;
        m.entries()
            .iter()
            .fold(0u128, |acc, &c| acc * p + c as u128)
    }

    pub(crate) fn linear_key(&self, key: u128) -> u128 {
        key / self.fiber
    }

    pub(crate) fn translation_key(&self, key: u128) -> u64 {
        (key % self.fiber) as u64
    }

    pub(crate) fn decode_linear(&self, linear_key: u128) -> FpMatrix {
        let p = self.modulus.as_u64() as u128;
        let n = self.dim * self.dim;
        let mut entries: SmallVec<[u32; 9]> = SmallVec::from_elem(0, n);
        let mut k = linear_key;
        for e in entries.iter_mut().rev() {
            *e = (k % p) as u32;
            k /= p;
        }
        FpMatrix::from_invertible(self.modulus, self.dim, &entries)
    }

    pub(crate) fn decode(&self, key: u128) -> AffineElement {
        let linear = self.decode_linear(self.linear_key(key));
        let translation = FpVector::from_index(self.modulus, self.dim, self.translation_key(key));
        AffineElement::new(linear, translation).expect("keys only encode invertible linear parts")
    }
}

/// A finite subset of `Aff_d(F_p)`, stored as sorted element keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSet {
    codec: Codec,
    keys: Vec<u128>,
    symmetric: bool,
    contains_identity: bool,
}

impl AffineSet {
    pub fn new(
        modulus: PrimeModulus,
        dim: usize,
        elements: impl IntoIterator<Item = AffineElement>,
    ) -> Result<Self> {
        let codec = Codec::new(modulus, dim)?;
        let mut keys = Vec::new();
        for g in elements {
            if g.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), g.modulus().get()));
            }
            if g.dim() != dim {
                return Err(Error::DimensionMismatch(dim, g.dim()));
            }
            keys.push(codec.encode(&g));
        }
        Ok(Self::from_keys(codec, keys))
    }

    pub fn empty(modulus: PrimeModulus, dim: usize) -> Result<Self> {
        Self::new(modulus, dim, [])
    }

    /// `{(M, ξ) : M ∈ group, ξ ∈ points}`.
    pub fn from_blocks(group: &MatrixGroup, points: &PointSet) -> Result<Self> {
        if group.modulus() != points.modulus() {
            return Err(Error::ModulusMismatch(
                group.modulus().get(),
                points.modulus().get(),
            ));
        }
        if group.dim() != points.dim() {
            return Err(Error::DimensionMismatch(group.dim(), points.dim()));
        }
        let codec = Codec::new(group.modulus(), group.dim())?;
        let mut keys = Vec::with_capacity(group.order() * points.len());
        for m in group.iter() {
            let base = codec.encode(&AffineElement::new(
                m.clone(),
                FpVector::zero(group.modulus(), group.dim()),
            )?);
            keys.extend(points.indices().iter().map(|&t| base + t as u128));
        }
        Ok(Self::from_keys(codec, keys))
    }

    pub(crate) fn from_keys(codec: Codec, mut keys: Vec<u128>) -> Self {
        keys.sort_unstable();
        keys.dedup();
        let identity = codec.encode(&AffineElement::identity(codec.modulus, codec.dim));
        let contains_identity = keys.binary_search(&identity).is_ok();
        let mut set = Self {
            codec,
            keys,
            symmetric: false,
            contains_identity,
        };
        let symmetric = set.iter().all(|g| set.contains(&g.inv()));
        set.symmetric = symmetric;
        set
    }

    pub(crate) fn codec(&self) -> Codec {
        self.codec
    }

    pub(crate) fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.codec.modulus
    }

    pub fn dim(&self) -> usize {
        self.codec.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// `A = A⁻¹`.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    pub fn contains(&self, g: &AffineElement) -> bool {
        g.modulus() == self.modulus()
            && g.dim() == self.dim()
            && self.keys.binary_search(&self.codec.encode(g)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = AffineElement> + '_ {
        self.keys.iter().map(|&k| self.codec.decode(k))
    }

    pub fn elements(&self) -> Vec<AffineElement> {
        self.iter().collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(
                self.modulus().get(),
                other.modulus().get(),
            ));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// `A A′ = {a a′ : a ∈ A, a′ ∈ A′}`.
    pub fn product(&self, other: &Self, caps: SetCaps, exec: Execution) -> Result<Self> {
        self.check_compatible(other)?;
        let work = self.len() as u64 * other.len() as u64;
        if work > caps.max_work {
            return Err(Error::cap("product work |A|·|A′|", caps.max_work, work));
        }
        let left = self.elements();
        let right = other.elements();
        let codec = self.codec;
        let block = left.len().div_ceil(64).max(1);
        let blocks: Vec<&[AffineElement]> = left.chunks(block).collect();
        let parts = exec.map(&blocks, |chunk| {
            let mut seen = HashSet::new();
            for a in chunk.iter() {
                for b in &right {
                    seen.insert(codec.encode(&a.mul(b)));
                }
                if seen.len() > caps.max_elements {
                    return Err(seen.len());
                }
            }
            Ok(seen.into_iter().collect::<Vec<_>>())
        });
        let mut keys = Vec::new();
        for part in parts {
            match part {
                Ok(k) => keys.extend(k),
                Err(reached) => {
                    return Err(Error::cap(
                        "affine product set",
                        caps.max_elements as u64,
                        reached as u64,
                    ))
                }
            }
        }
        keys.sort_unstable();
        keys.dedup();
        if keys.len() > caps.max_elements {
            return Err(Error::cap(
                "affine product set",
                caps.max_elements as u64,
                keys.len() as u64,
            ));
        }
        Ok(Self::from_keys(codec, keys))
    }

    /// `A⁻¹`.
    pub fn inverse(&self) -> Self {
        let keys = self.iter().map(|g| self.codec.encode(&g.inv())).collect();
        Self::from_keys(self.codec, keys)
    }

    /// `A^m` for `m ≥ 1`, by repeated right multiplication with `A`.
    pub fn power(&self, m: usize, caps: SetCaps, exec: Execution) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("power must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.product(self, caps, exec)?;
        }
        Ok(acc)
    }

    /// `A ·_E A′ = {a a′ : (a, a′) ∈ E}`, with `E ⊆ A × A′` checked.
    pub fn restricted_product<'a>(
        &self,
        other: &Self,
        pairs: impl IntoIterator<Item = (&'a AffineElement, &'a AffineElement)>,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let mut keys = Vec::new();
        for (a, b) in pairs {
            if !self.contains(a) || !other.contains(b) {
                return Err(Error::Precondition(
                    "restricted product pair outside A × A′".into(),
                ));
            }
            keys.push(self.codec.encode(&a.mul(b)));
        }
        Ok(Self::from_keys(self.codec, keys))
    }

    /// `A ∪ A⁻¹ ∪ {1}`.
    pub fn symmetrized(&self) -> Self {
        let mut keys = self.keys.clone();
        keys.extend(self.iter().map(|g| self.codec.encode(&g.inv())));
        keys.push(
            self.codec
                .encode(&AffineElement::identity(self.modulus(), self.dim())),
        );
        Self::from_keys(self.codec, keys)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut keys = self.keys.clone();
        keys.extend_from_slice(&other.keys);
        Ok(Self::from_keys(self.codec, keys))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let keys = self
            .keys
            .iter()
            .copied()
            .filter(|k| other.keys.binary_search(k).is_ok())
            .collect();
        Ok(Self::from_keys(self.codec, keys))
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.keys
            .iter()
            .filter(|k| other.keys.binary_search(k).is_ok())
            .count()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.codec == other.codec
            && self
                .keys
                .iter()
                .all(|k| other.keys.binary_search(k).is_ok())
    }

    /// `gA`.
    pub fn left_translate(&self, g: &AffineElement) -> Result<Self> {
        if g.modulus() != self.modulus() || g.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), g.dim()));
        }
        let keys = self.iter().map(|a| self.codec.encode(&g.mul(&a))).collect();
        Ok(Self::from_keys(self.codec, keys))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn aff1(p: PrimeModulus, a: i64, t: i64) -> AffineElement {
        AffineElement::new(FpMatrix::new(p, 1, &[a]).unwrap(), FpVector::new(p, &[t])).unwrap()
    }

    #[test]
    fn codec_round_trips() {
        let p = m(5);
        let g = AffineElement::new(
            FpMatrix::from_rows(p, &[vec![0, 4], vec![1, 3]]).unwrap(),
            FpVector::new(p, &[2, 1]),
        )
        .unwrap();
        let c = Codec::new(p, 2).unwrap();
        assert_eq!(c.decode(c.encode(&g)), g);
        assert!(Codec::new(PrimeModulus::new(2_147_483_647).unwrap(), 5).is_err());
    }

    #[test]
    fn translation_pair_squares_to_three() {
        let p = m(5);
        let a = AffineSet::new(p, 1, [aff1(p, 1, 0), aff1(p, 1, 1)]).unwrap();
        let a2 = a
            .product(&a, SetCaps::default(), Execution::Sequential)
            .unwrap();
        let want = AffineSet::new(p, 1, (0..3).map(|t| aff1(p, 1, t))).unwrap();
        assert_eq!(a2, want);
        assert!(!a.is_symmetric() && a.contains_identity());
    }

    #[test]
    fn subgroup_is_closed() {
        let p = m(7);
        let h = MatrixGroup::generate(p, 1, &[FpMatrix::new(p, 1, &[2]).unwrap()], 100).unwrap();
        let all = PointSet::from_indices(p, 1, (0..7).collect());
        let g = AffineSet::from_blocks(&h, &all).unwrap();
        assert_eq!(g.len(), 21);
        assert!(g.is_symmetric() && g.contains_identity());
        for k in 2..=3 {
            assert_eq!(
                g.power(k, SetCaps::default(), Execution::Parallel).unwrap(),
                g
            );
        }
    }

    #[test]
    fn restricted_product_of_nothing() {
        let p = m(5);
        let a = AffineSet::new(p, 1, [aff1(p, 1, 0), aff1(p, 2, 1)]).unwrap();
        assert!(a.restricted_product(&a, []).unwrap().is_empty());
        let outside = aff1(p, 3, 3);
        assert!(a.restricted_product(&a, [(&outside, &outside)]).is_err());
    }

    #[test]
    fn caps_trip() {
        let p = m(5);
        let a = AffineSet::new(p, 1, (0..5).map(|t| aff1(p, 2, t))).unwrap();
        let tight = SetCaps {
            max_elements: 3,
            max_work: 100,
        };
        assert!(matches!(
            a.product(&a, tight, Execution::Sequential),
            Err(Error::CapExceeded { .. })
        ));
        let no_work = SetCaps {
            max_elements: 100,
            max_work: 10,
        };
        assert!(a.product(&a, no_work, Execution::Sequential).is_err());
    }

    #[test]
    fn symmetrize_and_translate() {
        let p = m(5);
        let a = AffineSet::new(p, 1, [aff1(p, 2, 1)]).unwrap();
        let s = a.symmetrized();
        assert!(s.is_symmetric() && s.contains_identity());
        assert_eq!(s.len(), 3);
        let g = aff1(p, 3, 0);
        let ga = a.left_translate(&g).unwrap();
        assert!(ga.contains(&g.mul(&aff1(p, 2, 1))));
    }
}
