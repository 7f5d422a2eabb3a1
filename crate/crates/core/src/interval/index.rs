//! Indices that grade how well `a <= b` holds between two intervals.
//!
//! `psd_raw` and `osd` divide by the sum of half-widths, `pd` and `sd` by the
//! sum of full lengths.

use serde::{Deserialize, Serialize};

use super::{Interval, IntervalError};

/// `(osd, psd, pd, sd)` for a single pair, with `psd` and `pd` clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexQuadruple {
    pub osd: f64,
    pub psd_clamped: f64,
    pub pd: f64,
    pub sd: f64,
}

/// Endpoint-wise order: `a <= b` iff both endpoints of `a` are no larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderRelation {
    /// `a <= b` and `a == b`.
    LeqIshibuchi,
    /// `a <= b` and `a != b`.
    LtIshibuchi,
    Incomparable,
}

/// Median-based relation: `a < b` holds iff `m(a) <= m(b)`, and is called
/// optimistic when `upper(a) <= lower(b)`, pessimistic otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MedianRelation {
    NotSatisfied,
    Optimistic,
    Pessimistic,
}

fn half_width_sum(a: Interval, b: Interval) -> Result<f64, IntervalError> {
    let denom = a.width() + b.width();
    if denom > 0.0 {
        Ok(denom)
    } else {
        Err(IntervalError::DegeneratePair)
    }
}

/// Pessimistic satisfaction index `1 + (lower(b) - upper(a)) / (w(a) + w(b))`, unclamped.
pub fn psd_raw(a: Interval, b: Interval) -> Result<f64, IntervalError> {
    let denom = half_width_sum(a, b)?;
    Ok(1.0 + (b.lower() - a.upper()) / denom)
}

/// Optimistic satisfaction index, floored at zero.
pub fn osd(a: Interval, b: Interval) -> Result<f64, IntervalError> {
    let denom = half_width_sum(a, b)?;
    Ok(((b.lower() - a.upper()) / denom).max(0.0))
}

/// Possibility degree: [`sd`] capped at one.
pub fn pd(a: Interval, b: Interval) -> Result<f64, IntervalError> {
    if a.span() + b.span() > 0.0 {
        Ok(sd(a, b).min(1.0))
    } else {
        Err(IntervalError::DegeneratePair)
    }
}

/// Satisfaction index of `a ≼ b`: `max((upper(b) - lower(a)) / (len(a) + len(b)), 0)`.
///
/// Unbounded above. When both intervals are points the ratio is undefined and
/// the crisp comparison decides: `+inf` if `b > a`, `0` if `b < a`, `0.5` on a tie.
pub fn sd(a: Interval, b: Interval) -> f64 {
    let denom = a.span() + b.span();
    let numer = b.upper() - a.lower();
    if denom > 0.0 {
        (numer / denom).max(0.0)
    } else if numer > 0.0 {
        f64::INFINITY
    } else if numer < 0.0 {
        0.0
    } else {
        0.5
    }
}

pub fn quadruple(a: Interval, b: Interval) -> Result<IndexQuadruple, IntervalError> {
    let psd = psd_raw(a, b)?;
    Ok(IndexQuadruple {
        osd: osd(a, b)?,
        psd_clamped: psd.clamp(0.0, 1.0),
        pd: pd(a, b)?,
        sd: sd(a, b),
    })
}

pub fn classify_order(a: Interval, b: Interval) -> OrderRelation {
    if a.lower() <= b.lower() && a.upper() <= b.upper() {
        if a == b {
            OrderRelation::LeqIshibuchi
        } else {
            OrderRelation::LtIshibuchi
        }
    } else {
        OrderRelation::Incomparable
    }
}

pub fn median_order(a: Interval, b: Interval) -> MedianRelation {
    if a.median() > b.median() {
        MedianRelation::NotSatisfied
    } else if a.upper() <= b.lower() {
        MedianRelation::Optimistic
    } else {
        MedianRelation::Pessimistic
    }
}
