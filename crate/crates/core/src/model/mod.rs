//! The interval semi-absolute-deviation portfolio model.
//!
//! Allocation vectors always have `n + 1` entries: the `n` risky assets in
//! universe order followed by the risk-free asset.

mod evaluate;
mod plp2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::ReturnHistory;
use crate::interval::Interval;
use crate::lp::LpError;

pub use evaluate::{
    deviation_interval_t, gross_return_interval, net_return_interval, risk_constraint_holds,
    risk_constraint_slack, risk_interval, transaction_cost,
};
pub use plp2::{build_plp2, solve_portfolio, solve_portfolio_with, Plp2Layout};

/// Budget and x0-sum tolerance.
pub const BUDGET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field}: {message}")]
    InvalidProblem {
        field: &'static str,
        message: String,
    },
    #[error("bad parameter {name} = {value}: {message}")]
    BadParameter {
        name: &'static str,
        value: f64,
        message: &'static str,
    },
    #[error("infeasible: {0}")]
    Infeasible(InfeasibilityReason),
    #[error("LP reported unbounded; the portfolio LP construction is broken")]
    Unbounded,
    #[error(transparent)]
    Solver(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibilityReason {
    /// Budget and bounds are satisfiable, but not together with the risk row.
    RiskTolerance,
    /// Budget and bounds alone admit no allocation.
    Bounds,
}

impl std::fmt::Display for InfeasibilityReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfeasibilityReason::RiskTolerance => {
                f.write_str("risk tolerance too tight for the requested satisfaction index")
            }
            InfeasibilityReason::Bounds => f.write_str("upper bounds cannot cover the budget"),
        }
    }
}

/// Risky assets with their return intervals and history, plus the risk-free rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetUniverse {
    intervals: Vec<Interval>,
    risk_free_rate: f64,
    history: ReturnHistory,
}

impl AssetUniverse {
    pub fn new(
        intervals: Vec<Interval>,
        risk_free_rate: f64,
        history: ReturnHistory,
    ) -> Result<Self, ModelError> {
        if intervals.len() != history.n_assets() {
            return Err(ModelError::InvalidProblem {
                field: "intervals",
                message: format!(
                    "{} intervals for {} history columns",
                    intervals.len(),
                    history.n_assets()
                ),
            });
        }
        if !risk_free_rate.is_finite() {
            return Err(ModelError::InvalidProblem {
                field: "risk_free_rate",
                message: "must be finite".into(),
            });
        }
        Ok(Self {
            intervals,
            risk_free_rate,
            history,
        })
    }

    /// Number of risky assets.
    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn risk_free_rate(&self) -> f64 {
        self.risk_free_rate
    }

    pub fn history(&self) -> &ReturnHistory {
        &self.history
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioProblem {
    universe: AssetUniverse,
    transaction_rates: Vec<f64>,
    initial_holdings: Vec<f64>,
    upper_bounds: Vec<f64>,
    risk_tolerance: Interval,
}

impl PortfolioProblem {
    /// All vectors have `n + 1` entries, risk-free last.
    pub fn new(
        universe: AssetUniverse,
        transaction_rates: Vec<f64>,
        initial_holdings: Vec<f64>,
        upper_bounds: Vec<f64>,
        risk_tolerance: Interval,
    ) -> Result<Self, ModelError> {
        let len = universe.n() + 1;
        let invalid = |field, message: String| Err(ModelError::InvalidProblem { field, message });
        for (field, v) in [
            ("k", &transaction_rates),
            ("x0", &initial_holdings),
            ("u", &upper_bounds),
        ] {
            if v.len() != len {
                return invalid(field, format!("expected {len} entries, found {}", v.len()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return invalid(field, "entries must be finite".into());
            }
        }
        if transaction_rates.iter().any(|&k| k < 0.0) {
            return invalid("k", "transaction rates must be non-negative".into());
        }
        if initial_holdings.iter().any(|&x| x < 0.0) {
            return invalid("x0", "initial holdings must be non-negative".into());
        }
        let total: f64 = initial_holdings.iter().sum();
        if (total - 1.0).abs() > BUDGET_TOL {
            return invalid("x0", format!("initial holdings sum to {total}, expected 1"));
        }
        if upper_bounds.iter().any(|&u| u <= 0.0 || u > 1.0) {
            return invalid("u", "upper bounds must lie in (0, 1]".into());
        }
        if upper_bounds.iter().sum::<f64>() < 1.0 {
            return invalid(
                "u",
                "upper bounds sum below 1; the budget is unreachable".into(),
            );
        }
        if risk_tolerance.lower() < 0.0 {
            return invalid(
                "risk_tolerance",
                "lower tolerated risk must be non-negative".into(),
            );
        }
        Ok(Self {
            universe,
            transaction_rates,
            initial_holdings,
            upper_bounds,
            risk_tolerance,
        })
    }

    pub fn universe(&self) -> &AssetUniverse {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.n()
    }

    pub fn transaction_rates(&self) -> &[f64] {
        &self.transaction_rates
    }

    pub fn initial_holdings(&self) -> &[f64] {
        &self.initial_holdings
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper_bounds
    }

    pub fn risk_tolerance(&self) -> Interval {
        self.risk_tolerance
    }

    /// Same problem with a different tolerance interval.
    pub fn with_risk_tolerance(&self, risk_tolerance: Interval) -> Result<Self, ModelError> {
        Self::new(
            self.universe.clone(),
            self.transaction_rates.clone(),
            self.initial_holdings.clone(),
            self.upper_bounds.clone(),
            risk_tolerance,
        )
    }
}

/// Auxiliary LP values at the optimum, in layout order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Auxiliary {
    pub cost_bound: f64,
    pub d_plus: Vec<f64>,
    pub d_minus: Vec<f64>,
    pub y_lower: Vec<f64>,
    pub y_upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSolution {
    pub alpha: f64,
    pub lambda: f64,
    /// `n + 1` allocations, risk-free last.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub net_return_interval: Interval,
    pub risk_interval: Interval,
    /// `sd(risk_interval, risk_tolerance)`; infinite when both are points.
    #[serde(with = "crate::io::extended_f64")]
    pub satisfaction_achieved: f64,
    pub transaction_cost: f64,
    pub auxiliary: Auxiliary,
    pub iterations: usize,
}
