use std::ops::Range;

use super::set::AffineSet;
use crate::fp::{FpMatrix, PointSet};

/// `L(A)` and the fibers `R_M(A)` of an affine set.
#[derive(Clone, Debug)]
pub struct BlockView {
    base: AffineSet,
    linear_keys: Vec<u128>,
    ranges: Vec<Range<usize>>,
}

impl BlockView {
    pub fn new(base: &AffineSet) -> Self {
        let codec = base.codec();
        let keys = base.keys();
        let mut linear_keys = Vec::new();
        let mut ranges: Vec<Range<usize>> = Vec::new();
        for (i, &k) in keys.iter().enumerate() {
            let lk = codec.linear_key(k);
            if linear_keys.last() == Some(&lk) {
                ranges.last_mut().expect("paired with linear_keys").end = i + 1;
            } else {
                linear_keys.push(lk);
                ranges.push(i..i + 1);
            }
        }
        Self {
            base: base.clone(),
            linear_keys,
            ranges,
        }
    }

    pub fn base(&self) -> &AffineSet {
        &self.base
    }

    /// `|L(A)|`.
    pub fn linear_count(&self) -> usize {
        self.linear_keys.len()
    }

    /// `L(A)`.
    pub fn linear_parts(&self) -> Vec<FpMatrix> {
        let codec = self.base.codec();
        self.linear_keys
            .iter()
            .map(|&k| codec.decode_linear(k))
            .collect()
    }

    pub(crate) fn linear_keys(&self) -> &[u128] {
        &self.linear_keys
    }

    fn slot(&self, linear: &FpMatrix) -> Option<usize> {
        if linear.modulus() != self.base.modulus() || linear.dim() != self.base.dim() {
            return None;
        }
        self.slot_of_key(self.base.codec().encode_linear(linear))
    }

    pub(crate) fn slot_of_key(&self, linear_key: u128) -> Option<usize> {
        self.linear_keys.binary_search(&linear_key).ok()
    }

    pub fn contains_linear(&self, linear: &FpMatrix) -> bool {
        self.slot(linear).is_some()
    }

    /// `|R_M(A)|`, zero when `M ∉ L(A)`.
    pub fn fiber_len(&self, linear: &FpMatrix) -> usize {
        self.slot(linear).map_or(0, |s| self.ranges[s].len())
    }

    pub(crate) fn fiber_len_at(&self, slot: usize) -> usize {
        self.ranges[slot].len()
    }

    /// Translation keys of `R_M(A)` for the `slot`-th linear part, sorted.
    pub(crate) fn fiber_keys_at(&self, slot: usize) -> impl Iterator<Item = u64> + '_ {
        let codec = self.base.codec();
        self.base.keys()[self.ranges[slot].clone()]
            .iter()
            .map(move |&k| codec.translation_key(k))
    }

    /// `R_M(A)`.
    pub fn fiber(&self, linear: &FpMatrix) -> PointSet {
        let keys = self
            .slot(linear)
            .map(|s| self.fiber_keys_at(s).collect())
            .unwrap_or_default();
        PointSet::from_indices(self.base.modulus(), self.base.dim(), keys)
    }

    /// `max_N |R_N(A)|`.
    pub fn max_fiber(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    /// `min_N |R_N(A)|` over `N ∈ L(A)`.
    pub fn min_fiber(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).min().unwrap_or(0)
    }

    /// `Σ_M |R_M(A)|`, which equals `|A|`.
    pub fn fiber_total(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).sum()
    }

    /// `|L(A) ∩ L(A′)|`.
    pub fn common_linear_count(&self, other: &BlockView) -> usize {
        self.linear_keys
            .iter()
            .filter(|k| other.linear_keys.binary_search(k).is_ok())
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::{FpVector, PrimeModulus};
    use crate::group::AffineElement;

    #[test]
    fn fibers_partition_the_set() {
        let p = PrimeModulus::new(5).unwrap();
        let el = |a: i64, t: i64| {
            AffineElement::new(FpMatrix::new(p, 1, &[a]).unwrap(), FpVector::new(p, &[t])).unwrap()
        };
        let a = AffineSet::new(
            p,
            1,
            [el(1, 0), el(1, 3), el(2, 1), el(4, 0), el(4, 1), el(4, 2)],
        )
        .unwrap();
        let v = BlockView::new(&a);
        assert_eq!(v.linear_count(), 3);
        assert_eq!(v.fiber_total(), a.len());
        assert_eq!((v.max_fiber(), v.min_fiber()), (3, 1));
        let four = FpMatrix::new(p, 1, &[4]).unwrap();
        assert_eq!(v.fiber(&four).indices(), &[0, 1, 2]);
        assert_eq!(v.fiber_len(&FpMatrix::new(p, 1, &[3]).unwrap()), 0);
    }
}
