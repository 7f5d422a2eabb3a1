//! Closed real intervals and their arithmetic.
//!
//! An [`Interval`] is a pair `[lower, upper]` with `lower <= upper`. Addition,
//! subtraction and scalar multiplication follow the usual endpoint rules;
//! multiplication and division take the hull of the four endpoint
//! combinations. The comparison indices live in [`index`].

pub mod index;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use index::{
    classify_order, median_order, osd, pd, psd_raw, quadruple, sd, IndexQuadruple, MedianRelation,
    OrderRelation,
};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval: lower {lower} exceeds upper {upper}")]
    Inverted { lower: f64, upper: f64 },
    #[error("interval endpoint is not finite")]
    NonFinite,
    #[error("divisor interval [{lower}, {upper}] contains zero")]
    ZeroInDivisor { lower: f64, upper: f64 },
    #[error("both intervals are points; the index is undefined")]
    DegeneratePair,
}

/// A closed interval `[lower, upper]` of finite reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lower: f64,
    upper: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lower: f64,
    upper: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = IntervalError;

    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        Interval::new(raw.lower, raw.upper)
    }
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self, IntervalError> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(IntervalError::NonFinite);
        }
        if lower > upper {
            return Err(IntervalError::Inverted { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// The degenerate interval `[value, value]`.
    pub fn point(value: f64) -> Self {
        Self {
            lower: value,
            upper: value,
        }
    }

    /// Smallest interval holding every value of `values`. `None` when empty.
    pub fn hull<I: IntoIterator<Item = f64>>(values: I) -> Option<Self> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(Self {
            lower: lo,
            upper: hi,
        })
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.lower
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Midpoint `(upper + lower) / 2`.
    pub fn median(&self) -> f64 {
        (self.upper + self.lower) / 2.0
    }

    /// Half-width `(upper - lower) / 2`.
    pub fn width(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }

    /// Full length `upper - lower`.
    pub fn span(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// `k * self`, swapping endpoints for negative `k`.
    pub fn scale(self, k: f64) -> Self {
        if k >= 0.0 {
            Self {
                lower: k * self.lower,
                upper: k * self.upper,
            }
        } else {
            Self {
                lower: k * self.upper,
                upper: k * self.lower,
            }
        }
    }

    /// `self + k` for a crisp `k`; both endpoints move by the same amount.
    pub fn shift(self, k: f64) -> Self {
        Self {
            lower: self.lower + k,
            upper: self.upper + k,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        let products = [
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        ];
        Self::hull(products).expect("four products")
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: Self) -> Result<Self, IntervalError> {
        if other.lower <= 0.0 && 0.0 <= other.upper {
            return Err(IntervalError::ZeroInDivisor {
                lower: other.lower,
                upper: other.upper,
            });
        }
        let quotients = [
            self.lower / other.lower,
            self.lower / other.upper,
            self.upper / other.lower,
            self.upper / other.upper,
        ];
        Ok(Self::hull(quotients).expect("four quotients"))
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Self) -> Self {
        Self {
            lower: self.lower + rhs.lower,
            upper: self.upper + rhs.upper,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Self) -> Self {
        Self {
            lower: self.lower - rhs.upper,
            upper: self.upper - rhs.lower,
        }
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 5.0), iv(4.0, 7.0));
        assert_eq!(iv(0.0, 0.0) + iv(3.0, 5.0), iv(3.0, 5.0));
        assert_eq!(iv(-1.0, 1.0) + iv(-2.0, 2.0), iv(-3.0, 3.0));
    }

    #[test]
    fn sub_examples() {
        assert_eq!(iv(1.0, 2.0) - iv(3.0, 5.0), iv(-4.0, -1.0));
        assert_eq!(iv(1.0, 2.0) - iv(0.0, 0.0), iv(1.0, 2.0));
        // a - a doubles the width instead of collapsing to zero
        assert_eq!(iv(1.0, 2.0) - iv(1.0, 2.0), iv(-1.0, 1.0));
    }

    #[test]
    fn scale_examples() {
        assert_eq!(iv(1.0, 3.0).scale(2.0), iv(2.0, 6.0));
        assert_eq!(iv(1.0, 3.0).scale(-2.0), iv(-6.0, -2.0));
        assert_eq!(iv(1.0, 3.0).scale(0.0), iv(0.0, 0.0));
    }

    #[test]
    fn mul_and_div() {
        assert_eq!(iv(1.0, 2.0).mul(iv(3.0, 4.0)), iv(3.0, 8.0));
        assert_eq!(iv(-1.0, 2.0).mul(iv(3.0, 4.0)), iv(-4.0, 8.0));
        assert_eq!(
            iv(1.0, 2.0).div(iv(0.0, 1.0)),
            Err(IntervalError::ZeroInDivisor {
                lower: 0.0,
                upper: 1.0
            })
        );
        assert_eq!(iv(2.0, 4.0).div(iv(1.0, 2.0)).unwrap(), iv(1.0, 4.0));
        assert!(iv(1.0, 2.0).div(iv(-1.0, 0.0)).is_err());
    }

    #[test]
    fn median_and_half_width() {
        let a = iv(0.0, 2.0);
        assert_eq!(a.median(), 1.0);
        assert_eq!(a.width(), 1.0);
        assert_eq!(a.span(), 2.0);
    }

    #[test]
    fn rejects_inverted_and_non_finite() {
        assert!(matches!(
            Interval::new(2.0, 1.0),
            Err(IntervalError::Inverted { .. })
        ));
        assert_eq!(Interval::new(f64::NAN, 1.0), Err(IntervalError::NonFinite));
        assert_eq!(
            Interval::new(0.0, f64::INFINITY),
            Err(IntervalError::NonFinite)
        );
    }

    #[test]
    fn serde_uses_lower_upper_object() {
        let json = serde_json::to_string(&iv(0.015, 0.04)).unwrap();
        assert_eq!(json, r#"{"lower":0.015,"upper":0.04}"#);
        let back: Interval = serde_json::from_str(&json).unwrap();
        assert_eq!(back, iv(0.015, 0.04));
        assert!(serde_json::from_str::<Interval>(r#"{"lower":1,"upper":0}"#).is_err());
    }
}
