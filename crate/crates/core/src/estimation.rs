//! Expected-return intervals from historical returns and external forecasts.
//!
//! Each risky asset gets three scalar factors: the arithmetic mean of its
//! history, the mean of its most recent `m` periods, and a forecast supplied
//! by the caller. The interval is the hull of the three.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;
use crate::model::AssetUniverse;

/// Window used for the tendency factor when none is given.
pub const DEFAULT_TENDENCY_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("history needs at least one period and one asset")]
    Empty,
    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite return at period {period}, asset {asset}")]
    NonFinite { period: usize, asset: usize },
    #[error("{what}: expected {expected} entries, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("tendency window {window} exceeds the {periods} available periods")]
    WindowTooLarge { window: usize, periods: usize },
    #[error("tendency window must be at least 1")]
    EmptyWindow,
    #[error("non-finite {0}")]
    NonFiniteInput(&'static str),
}

/// Per-period simple returns, `T` periods by `n` assets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHistory")]
pub struct ReturnHistory {
    periods: Vec<String>,
    assets: Vec<String>,
    returns: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawHistory {
    periods: Vec<String>,
    assets: Vec<String>,
    returns: Vec<Vec<f64>>,
}

impl TryFrom<RawHistory> for ReturnHistory {
    type Error = EstimationError;

    fn try_from(raw: RawHistory) -> Result<Self, Self::Error> {
        ReturnHistory::new(raw.periods, raw.assets, raw.returns)
    }
}

impl ReturnHistory {
    /// `returns[t][j]` is the return of asset `j` in period `t`.
    pub fn new(
        periods: Vec<String>,
        assets: Vec<String>,
        returns: Vec<Vec<f64>>,
    ) -> Result<Self, EstimationError> {
        if returns.is_empty() || assets.is_empty() {
            return Err(EstimationError::Empty);
        }
        if periods.len() != returns.len() {
            return Err(EstimationError::LengthMismatch {
                what: "period labels",
                expected: returns.len(),
                found: periods.len(),
            });
        }
        for (t, row) in returns.iter().enumerate() {
            if row.len() != assets.len() {
                return Err(EstimationError::RaggedRow {
                    row: t,
                    expected: assets.len(),
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(EstimationError::NonFinite {
                    period: t,
                    asset: j,
                });
            }
        }
        Ok(Self {
            periods,
            assets,
            returns,
        })
    }

    /// Convenience constructor with generated labels (`t1..`, `A1..`).
    pub fn from_rows(returns: Vec<Vec<f64>>) -> Result<Self, EstimationError> {
        let n = returns.first().map_or(0, Vec::len);
        let periods = (1..=returns.len()).map(|t| format!("t{t}")).collect();
        let assets = (1..=n).map(|j| format!("A{j}")).collect();
        Self::new(periods, assets, returns)
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn n_periods(&self) -> usize {
        self.returns.len()
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.returns
    }

    #[inline]
    pub fn value(&self, period: usize, asset: usize) -> f64 {
        self.returns[period][asset]
    }

    pub fn column(&self, asset: usize) -> impl Iterator<Item = f64> + '_ {
        assert!(asset < self.n_assets(), "asset index {asset} out of range");
        self.returns.iter().map(move |row| row[asset])
    }
}

/// The three return factors of one asset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnFactors {
    pub r_a: f64,
    pub r_h: f64,
    pub r_f: f64,
}

/// Mean of the asset's full history.
///
/// # Panics
/// If `asset` is out of range.
pub fn arithmetic_mean(history: &ReturnHistory, asset: usize) -> f64 {
    history.column(asset).sum::<f64>() / history.n_periods() as f64
}

/// Mean of the last `window` periods of the asset's history.
pub fn tendency_factor(
    history: &ReturnHistory,
    asset: usize,
    window: usize,
) -> Result<f64, EstimationError> {
    let periods = history.n_periods();
    if window == 0 {
        return Err(EstimationError::EmptyWindow);
    }
    if window > periods {
        return Err(EstimationError::WindowTooLarge { window, periods });
    }
    let recent: f64 = history.column(asset).skip(periods - window).sum();
    Ok(recent / window as f64)
}

/// `[min, max]` of the three factors.
pub fn return_interval(factors: ReturnFactors) -> Interval {
    Interval::hull([factors.r_a, factors.r_h, factors.r_f]).expect("three factors")
}

pub fn asset_factors(
    history: &ReturnHistory,
    asset: usize,
    forecast: f64,
    window: usize,
) -> Result<ReturnFactors, EstimationError> {
    Ok(ReturnFactors {
        r_a: arithmetic_mean(history, asset),
        r_h: tendency_factor(history, asset, window)?,
        r_f: forecast,
    })
}

/// Estimate every risky asset's interval and attach the risk-free rate.
pub fn estimate_universe(
    history: ReturnHistory,
    forecasts: &[f64],
    window: usize,
    risk_free_rate: f64,
) -> Result<AssetUniverse, EstimationError> {
    let n = history.n_assets();
    if forecasts.len() != n {
        return Err(EstimationError::LengthMismatch {
            what: "forecasts",
            expected: n,
            found: forecasts.len(),
        });
    }
    if forecasts.iter().any(|f| !f.is_finite()) {
        return Err(EstimationError::NonFiniteInput("forecast"));
    }
    if !risk_free_rate.is_finite() {
        return Err(EstimationError::NonFiniteInput("risk-free rate"));
    }
    let intervals = forecasts
        .iter()
        .enumerate()
        .map(|(j, &f)| asset_factors(&history, j, f, window).map(return_interval))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AssetUniverse::new(intervals, risk_free_rate, history)
        .expect("interval count matches history columns"))
}
