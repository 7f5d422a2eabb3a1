//! Dense linear programs and a bounded-variable simplex solver.
//!
//! A [`StandardLP`] maximizes `objective · x` subject to equality rows,
//! `<=` rows and per-variable bounds. Lower bounds may be `-inf` and upper
//! bounds `+inf`.

mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use simplex::{solve_lp, solve_lp_with, SimplexOptions};

pub const DEFAULT_FEAS_TOL: f64 = 1e-9;
pub const DEFAULT_OPT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("simplex hit the iteration cap ({iterations}) in phase {phase}")]
    IterationLimit { iterations: usize, phase: u8 },
    #[error("solution failed post-solve verification (max violation {max_violation:e})")]
    Numerical { max_violation: f64 },
}

/// One constraint row `coeffs · x (= or <=) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub name: String,
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardLP {
    /// Maximized.
    pub objective: Vec<f64>,
    pub eq_constraints: Vec<LinearRow>,
    pub le_constraints: Vec<LinearRow>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
    pub var_names: Vec<String>,
}

impl StandardLP {
    /// An LP over `n` variables named `x0..`, all bounded to `[0, inf)`, with a zero objective.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            eq_constraints: Vec::new(),
            le_constraints: Vec::new(),
            var_lower: vec![0.0; n],
            var_upper: vec![f64::INFINITY; n],
            var_names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.eq_constraints.len() + self.le_constraints.len()
    }

    pub fn add_eq(&mut self, name: impl Into<String>, coeffs: Vec<f64>, rhs: f64) {
        self.eq_constraints.push(LinearRow {
            name: name.into(),
            coeffs,
            rhs,
        });
    }

    pub fn add_le(&mut self, name: impl Into<String>, coeffs: Vec<f64>, rhs: f64) {
        self.le_constraints.push(LinearRow {
            name: name.into(),
            coeffs,
            rhs,
        });
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        let bad = |msg: String| Err(LpError::Malformed(msg));
        if self.var_lower.len() != n || self.var_upper.len() != n || self.var_names.len() != n {
            return bad(format!(
                "bound/name vectors must have {n} entries (lower {}, upper {}, names {})",
                self.var_lower.len(),
                self.var_upper.len(),
                self.var_names.len()
            ));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return bad(format!("objective coefficient {j} is not finite"));
        }
        for j in 0..n {
            let (lo, hi) = (self.var_lower[j], self.var_upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return bad(format!("variable {j} has unusable bounds [{lo}, {hi}]"));
            }
            if lo > hi {
                return bad(format!(
                    "variable {j} has lower bound {lo} above upper {hi}"
                ));
            }
        }
        for (kind, rows) in [("eq", &self.eq_constraints), ("le", &self.le_constraints)] {
            for (i, row) in rows.iter().enumerate() {
                if row.coeffs.len() != n {
                    return bad(format!(
                        "{kind} row {i} ({}) has {} coefficients, expected {n}",
                        row.name,
                        row.coeffs.len()
                    ));
                }
                if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                    return bad(format!("{kind} row {i} ({}) has non-finite data", row.name));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    /// Empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationSite {
    EqRow(usize),
    LeRow(usize),
    LowerBound(usize),
    UpperBound(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub site: ViolationSite,
    pub name: String,
    pub amount: f64,
}

/// Residuals of a candidate point. Row residuals are signed `lhs - rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub eq_residuals: Vec<f64>,
    pub le_residuals: Vec<f64>,
    pub violations: Vec<Violation>,
    pub max_violation: f64,
}

impl VerificationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `x` against every row and bound of `lp`.
///
/// # Panics
/// If `x.len()` differs from the variable count.
pub fn verify_solution(lp: &StandardLP, x: &[f64], feas_tol: f64) -> VerificationReport {
    assert_eq!(x.len(), lp.n_vars(), "point dimension mismatch");
    let mut violations = Vec::new();
    let mut max_violation = 0.0f64;
    let mut record = |site, name: &str, amount: f64| {
        max_violation = max_violation.max(amount);
        if amount > feas_tol {
            violations.push(Violation {
                site,
                name: name.to_string(),
                amount,
            });
        }
    };

    let eq_residuals: Vec<f64> = lp
        .eq_constraints
        .iter()
        .map(|row| dot(&row.coeffs, x) - row.rhs)
        .collect();
    for (i, (row, r)) in lp.eq_constraints.iter().zip(&eq_residuals).enumerate() {
        record(ViolationSite::EqRow(i), &row.name, r.abs());
    }
    let le_residuals: Vec<f64> = lp
        .le_constraints
        .iter()
        .map(|row| dot(&row.coeffs, x) - row.rhs)
        .collect();
    for (i, (row, r)) in lp.le_constraints.iter().zip(&le_residuals).enumerate() {
        record(ViolationSite::LeRow(i), &row.name, r.max(0.0));
    }
    for (j, &v) in x.iter().enumerate() {
        let name = &lp.var_names[j];
        record(
            ViolationSite::LowerBound(j),
            name,
            (lp.var_lower[j] - v).max(0.0),
        );
        record(
            ViolationSite::UpperBound(j),
            name,
            (v - lp.var_upper[j]).max(0.0),
        );
    }
    VerificationReport {
        eq_residuals,
        le_residuals,
        violations,
        max_violation,
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
