use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A nonnegative threshold carried both as `f64` and as an exact rational.
///
/// [`Level::decimal`] reads the shortest decimal rendering of the float, so
/// `0.3` means exactly `3/10`; [`Level::binary`] keeps the exact binary value.
#[derive(Clone, PartialEq)]
pub struct Level {
    value: f64,
    exact: BigRational,
}

impl Level {
    pub fn decimal(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "threshold must be finite and nonnegative, got {x}"
            )));
        }
        let text = format!("{x}");
        let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
        let digits: BigInt = format!("{int}{frac}")
            .parse()
            .map_err(|_| Error::InvalidArgument(text.clone()))?;
        let denom = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(Self {
            value: x,
            exact: BigRational::new(digits, denom),
        })
    }

    pub fn binary(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "threshold must be finite and nonnegative, got {x}"
            )));
        }
        let exact = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Ok(Self { value: x, exact })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    /// `α²/2`.
    pub fn half_square(&self) -> Self {
        Self {
            value: self.value * self.value / 2.0,
            exact: &self.exact * &self.exact / BigInt::from(2),
        }
    }

    /// Exact `count ≥ level · n` for nonnegative integers.
    pub fn le_times(&self, n: u128, count: u128) -> bool {
        BigRational::from_integer(BigInt::from(count)) >= &self.exact * BigInt::from(n)
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn is_at_most_one(&self) -> bool {
        !self.exact.is_negative() && self.exact <= BigRational::one()
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Level({} = {})", self.value, self.exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_reads_shortest_form() {
        let l = Level::decimal(0.3).unwrap();
        assert_eq!(l.exact(), &BigRational::new(3.into(), 10.into()));
        assert_eq!(Level::decimal(1.0).unwrap().exact(), &BigRational::one());
        assert_eq!(
            Level::decimal(1e-7).unwrap().exact(),
            &BigRational::new(1.into(), 10_000_000.into())
        );
        assert!(Level::decimal(-0.1).is_err());
    }

    #[test]
    fn half_square_is_exact() {
        let l = Level::decimal(0.3).unwrap().half_square();
        assert_eq!(l.exact(), &BigRational::new(9.into(), 200.into()));
        assert!((l.value() - 0.045).abs() < 1e-17);
    }

    #[test]
    fn binary_keeps_float_bits() {
        let l = Level::binary(0.5).unwrap();
        assert_eq!(l.exact(), &BigRational::new(1.into(), 2.into()));
        assert!(Level::decimal(0.08).unwrap().le_times(49, 4));
        assert!(!Level::decimal(0.08).unwrap().le_times(49, 3));
    }
}
