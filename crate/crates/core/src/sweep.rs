//! Grids of `(alpha, lambda)` solves and the checks that go with them.
//!
//! Optimal values are non-increasing in both parameters: raising `alpha`
//! shrinks the feasible set, raising `lambda` shifts weight to the lower
//! (smaller) return endpoints.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;
use crate::model::{solve_portfolio, InfeasibilityReason, ModelError, PortfolioProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("{axis} grid is empty")]
    EmptyGrid { axis: &'static str },
    #[error("{axis} value {value} is out of range")]
    BadValue { axis: &'static str, value: f64 },
    #[error("malformed grid {spec:?}: {message}")]
    BadGridSpec { spec: String, message: String },
    #[error("table has no cell at alpha = {alpha}, lambda = {lambda}")]
    MissingCorner { alpha: f64, lambda: f64 },
    #[error("corner cell alpha = {alpha}, lambda = {lambda} is not optimal")]
    CornerNotOptimal { alpha: f64, lambda: f64 },
}

pub fn default_alphas() -> Vec<f64> {
    vec![0.25, 0.5, 0.75, 1.0]
}

/// `0, 0.12, ..., 0.96`.
pub fn default_lambdas() -> Vec<f64> {
    (0..=8).map(|i| (i * 12) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Optimal,
    Infeasible,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub lambda: f64,
    pub status: CellStatus,
    /// Infeasibility reason or solver error text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub objective: Option<f64>,
    pub return_interval: Option<Interval>,
    pub risk_interval: Option<Interval>,
    pub allocation: Option<Vec<f64>>,
}

impl SweepRow {
    pub fn is_optimal(&self) -> bool {
        self.status == CellStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub fingerprint: String,
    /// Ordered by `(alpha, lambda)` ascending.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn cell(&self, alpha: f64, lambda: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.alpha == alpha && r.lambda == lambda)
    }
}

fn normalize_grid(axis: &'static str, values: &[f64], max: f64) -> Result<Vec<f64>, SweepError> {
    if values.is_empty() {
        return Err(SweepError::EmptyGrid { axis });
    }
    if let Some(&value) = values
        .iter()
        .find(|v| !(v.is_finite() && **v >= 0.0 && **v <= max))
    {
        return Err(SweepError::BadValue { axis, value });
    }
    let mut grid = values.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// Solve every cell of `alphas x lambdas`. Cells run in parallel; rows come
/// back sorted and deduplicated regardless of input order.
pub fn sweep(
    problem: &PortfolioProblem,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<SweepTable, SweepError> {
    let alphas = normalize_grid("alpha", alphas, f64::INFINITY)?;
    let lambdas = normalize_grid("lambda", lambdas, 1.0)?;
    let cells: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| lambdas.iter().map(move |&l| (a, l)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(alpha, lambda)| solve_cell(problem, alpha, lambda))
        .collect();
    Ok(SweepTable {
        fingerprint: crate::io::fingerprint(problem),
        rows,
    })
}

fn solve_cell(problem: &PortfolioProblem, alpha: f64, lambda: f64) -> SweepRow {
    let empty = |status, detail: String| SweepRow {
        alpha,
        lambda,
        status,
        detail: Some(detail),
        objective: None,
        return_interval: None,
        risk_interval: None,
        allocation: None,
    };
    match solve_portfolio(problem, alpha, lambda) {
        Ok(s) => SweepRow {
            alpha,
            lambda,
            status: CellStatus::Optimal,
            detail: None,
            objective: Some(s.objective_value),
            return_interval: Some(s.net_return_interval),
            risk_interval: Some(s.risk_interval),
            allocation: Some(s.x),
        },
        Err(ModelError::Infeasible(reason)) => {
            empty(CellStatus::Infeasible, reason_tag(reason).into())
        }
        Err(e) => empty(CellStatus::Failed, e.to_string()),
    }
}

fn reason_tag(reason: InfeasibilityReason) -> &'static str {
    match reason {
        InfeasibilityReason::RiskTolerance => "risk_tolerance",
        InfeasibilityReason::Bounds => "bounds",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Alpha,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotonicityViolation {
    /// The objective rose by `increase` moving from `from` to `to` along `axis`.
    ObjectiveIncrease {
        axis: Axis,
        from: (f64, f64),
        to: (f64, f64),
        increase: f64,
    },
    /// A larger alpha was feasible where a smaller one was not.
    FeasibilityNesting {
        infeasible: (f64, f64),
        feasible: (f64, f64),
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub violations: Vec<MonotonicityViolation>,
    pub comparisons: usize,
}

impl MonotonicityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Walk each grid line in increasing parameter order and flag any objective
/// increase above `tol` between consecutive optimal cells.
pub fn check_monotonicity(table: &SweepTable, tol: f64) -> MonotonicityReport {
    let mut violations = Vec::new();
    let mut comparisons = 0;
    let mut alphas: Vec<f64> = table.rows.iter().map(|r| r.alpha).collect();
    let mut lambdas: Vec<f64> = table.rows.iter().map(|r| r.lambda).collect();
    for v in [&mut alphas, &mut lambdas] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }

    let mut walk = |axis: Axis, line: Vec<&SweepRow>| {
        let mut prev: Option<&SweepRow> = None;
        let mut first_infeasible: Option<&SweepRow> = None;
        for row in line {
            if row.is_optimal() {
                if let Some(p) = prev {
                    comparisons += 1;
                    let increase = row.objective.unwrap() - p.objective.unwrap();
                    if increase > tol {
                        violations.push(MonotonicityViolation::ObjectiveIncrease {
                            axis,
                            from: (p.alpha, p.lambda),
                            to: (row.alpha, row.lambda),
                            increase,
                        });
                    }
                }
                if let (Axis::Alpha, Some(bad)) = (axis, first_infeasible) {
                    violations.push(MonotonicityViolation::FeasibilityNesting {
                        infeasible: (bad.alpha, bad.lambda),
                        feasible: (row.alpha, row.lambda),
                    });
                }
                prev = Some(row);
            } else if row.status == CellStatus::Infeasible && first_infeasible.is_none() {
                first_infeasible = Some(row);
            }
        }
    };

    for &alpha in &alphas {
        let mut line: Vec<&SweepRow> = table.rows.iter().filter(|r| r.alpha == alpha).collect();
        line.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        walk(Axis::Lambda, line);
    }
    for &lambda in &lambdas {
        let mut line: Vec<&SweepRow> = table.rows.iter().filter(|r| r.lambda == lambda).collect();
        line.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        walk(Axis::Alpha, line);
    }
    MonotonicityReport {
        violations,
        comparisons,
    }
}

/// `(V(alpha_hi, 1), V(alpha_lo, 0))`: every optimal value with alpha in
/// `[alpha_lo, alpha_hi]` lies between them.
pub fn bracket_values(
    table: &SweepTable,
    alpha_lo: f64,
    alpha_hi: f64,
) -> Result<(f64, f64), SweepError> {
    let corner = |alpha: f64, lambda: f64| {
        let row = table
            .cell(alpha, lambda)
            .ok_or(SweepError::MissingCorner { alpha, lambda })?;
        row.objective
            .filter(|_| row.is_optimal())
            .ok_or(SweepError::CornerNotOptimal { alpha, lambda })
    };
    Ok((corner(alpha_hi, 1.0)?, corner(alpha_lo, 0.0)?))
}

/// Parse a grid: a comma list (`0.5,1`) or an inclusive range `start:stop:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, SweepError> {
    let bad = |message: &str| SweepError::BadGridSpec {
        spec: spec.to_string(),
        message: message.to_string(),
    };
    let num = |s: &str| -> Result<f64, SweepError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(&format!("{:?} is not a finite decimal", s.trim())))
    };
    let spec_trim = spec.trim();
    if spec_trim.is_empty() {
        return Err(bad("empty"));
    }
    if spec_trim.contains(':') {
        let parts: Vec<&str> = spec_trim.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad("range needs start:stop:step"));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step <= 0.0 || stop < start {
            return Err(bad("range needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect())
    } else {
        spec_trim.split(',').map(num).collect()
    }
}
