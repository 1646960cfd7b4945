use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime `p < 2^31`. All residues are stored canonically in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub const MAX: u64 = (1 << 31) - 1;

    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p > Self::MAX || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        self.0 as u64
    }

    /// Reduces an arbitrary signed integer.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.0 as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.0 as u64 - 2))
        }
    }

    /// Smallest generator of the cyclic group `F_p^×`.
    pub fn primitive_root(self) -> u32 {
        let order = self.0 as u64 - 1;
        let factors = prime_factors(order);
        (2..self.0)
            .find(|&g| factors.iter().all(|&q| self.pow(g, order / q) != 1))
            .unwrap_or(1)
    }

    /// `p^d` if it fits in a `u64`.
    pub fn space_size(self, d: usize) -> Option<u64> {
        (self.0 as u64).checked_pow(d as u32)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0 as u64
    }
}

/// Deterministic trial division; adequate below 2^31.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_primes_and_two() {
        for n in [0, 1, 2, 4, 9, 15, 91, 1 << 31] {
            assert!(PrimeModulus::new(n).is_err(), "{n}");
        }
        for n in [3, 5, 7, 101, 10007, 2147483647] {
            assert!(PrimeModulus::new(n).is_ok(), "{n}");
        }
    }

    #[test]
    fn field_ops() {
        let p = PrimeModulus::new(5).unwrap();
        assert_eq!(p.inv(2), Some(3));
        assert_eq!(p.inv(0), None);
        assert_eq!(p.reduce(-1), 4);
        assert_eq!(p.sub(1, 3), 3);
        assert_eq!(p.primitive_root(), 2);
        assert_eq!(PrimeModulus::new(7).unwrap().primitive_root(), 3);
    }

    #[test]
    fn large_modulus_products_are_exact() {
        let p = PrimeModulus::new(2147483647).unwrap();
        let a = 2147483646;
        assert_eq!(p.mul(a, a), 1);
        assert_eq!(p.mul(a, p.inv(a).unwrap()), 1);
    }
}
