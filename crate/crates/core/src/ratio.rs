//! Exact rational fractions for slashing and incentive arithmetic.
//!
//! Token amounts are integers and every inequality in the incentive checks is
//! strict, so fractions are kept as exact `num/den` pairs and compared by
//! cross-multiplication in 128-bit space. No floating point anywhere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A rational number `num/den` with `den > 0`.
///
/// Slash fractions additionally require `0 < num/den <= 1`; use
/// [`Ratio::new_fraction`] for those.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("fraction {num}/{den} is outside (0, 1]")]
    OutOfRange { num: u64, den: u64 },
}

impl Ratio {
    pub const fn new(num: u64, den: u64) -> Result<Self, RatioError> {
        if den == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        Ok(Ratio { num, den })
    }

    /// A slash fraction in `(0, 1]`.
    pub const fn new_fraction(num: u64, den: u64) -> Result<Self, RatioError> {
        if den == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        if num == 0 || num > den {
            return Err(RatioError::OutOfRange { num, den });
        }
        Ok(Ratio { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `floor(self * amount)`, the rounded-down share of an integer amount.
    pub fn mul_floor(&self, amount: u128) -> u128 {
        self.num as u128 * amount / self.den as u128
    }

    /// Exact test of `self * amount > bound`.
    pub fn mul_exceeds(&self, amount: u128, bound: u128) -> bool {
        self.num as u128 * amount > bound * self.den as u128
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Signed exact rational, used only for reporting inequality slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedRatio {
    pub num: i128,
    pub den: u64,
}

impl std::fmt::Display for SignedRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_range_enforced() {
        assert!(Ratio::new_fraction(1, 10).is_ok());
        assert!(Ratio::new_fraction(10, 10).is_ok());
        assert_eq!(
            Ratio::new_fraction(11, 10),
            Err(RatioError::OutOfRange { num: 11, den: 10 })
        );
        assert_eq!(
            Ratio::new_fraction(0, 10),
            Err(RatioError::OutOfRange { num: 0, den: 10 })
        );
        assert_eq!(Ratio::new_fraction(1, 0), Err(RatioError::ZeroDenominator));
    }

    #[test]
    fn mul_floor_rounds_down() {
        let tenth = Ratio::new_fraction(1, 10).unwrap();
        assert_eq!(tenth.mul_floor(100), 10);
        assert_eq!(tenth.mul_floor(99), 9);
        assert_eq!(tenth.mul_floor(9), 0);
        let full = Ratio::new_fraction(1, 1).unwrap();
        assert_eq!(full.mul_floor(77), 77);
    }

    #[test]
    fn mul_exceeds_is_strict() {
        let half = Ratio::new_fraction(1, 2).unwrap();
        assert!(half.mul_exceeds(1000, 499));
        assert!(!half.mul_exceeds(1000, 500)); // equality is not enough
        assert!(!half.mul_exceeds(1000, 501));
    }
}
