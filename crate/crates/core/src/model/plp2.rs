//! The two-parameter linear program for a given satisfaction index `alpha`
//! and return weighting `lambda`.
//!
//! Absolute rebalancing terms are split into `d_plus - d_minus`, and each
//! period's floored shortfall gets an epigraph variable (`y_lower`,
//! `y_upper`). A single `cost_bound` variable carries the total cost into
//! the objective.

use super::evaluate::{
    net_return_interval, risk_constraint_slack, risk_interval, transaction_cost,
};
use super::{Auxiliary, InfeasibilityReason, ModelError, PortfolioProblem, PortfolioSolution};
use crate::interval::sd;
use crate::lp::{solve_lp_with, LpError, LpStatus, SimplexOptions, StandardLP};

/// Variable positions: allocations `x_1..x_{n+1}`, the cost bound, `d+`,
/// `d-` (each `n + 1`), then `y_lower`, `y_upper` (each `T`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plp2Layout {
    pub n: usize,
    pub periods: usize,
}

impl Plp2Layout {
    pub fn new(n: usize, periods: usize) -> Self {
        Self { n, periods }
    }

    pub fn of(problem: &PortfolioProblem) -> Self {
        Self::new(problem.n(), problem.universe().history().n_periods())
    }

    /// Allocation `i` in `0..=n`; `n` is the risk-free asset.
    pub fn alloc(&self, i: usize) -> usize {
        i
    }

    pub fn cost_bound(&self) -> usize {
        self.n + 1
    }

    pub fn d_plus(&self, i: usize) -> usize {
        self.n + 2 + i
    }

    pub fn d_minus(&self, i: usize) -> usize {
        self.n + 2 + (self.n + 1) + i
    }

    pub fn y_lower(&self, t: usize) -> usize {
        self.n + 2 + 2 * (self.n + 1) + t
    }

    pub fn y_upper(&self, t: usize) -> usize {
        self.y_lower(0) + self.periods + t
    }

    pub fn n_vars(&self) -> usize {
        (self.n + 2) + 2 * (self.n + 1) + 2 * self.periods
    }

    fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.n).map(|i| format!("x{}", i + 1)).collect();
        names.push(format!("x{}_risk_free", self.n + 1));
        names.push("cost_bound".into());
        names.extend((0..=self.n).map(|i| format!("d_plus{}", i + 1)));
        names.extend((0..=self.n).map(|i| format!("d_minus{}", i + 1)));
        names.extend((0..self.periods).map(|t| format!("y_lower{}", t + 1)));
        names.extend((0..self.periods).map(|t| format!("y_upper{}", t + 1)));
        names
    }
}

fn check_parameters(alpha: f64, lambda: f64) -> Result<(), ModelError> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(ModelError::BadParameter {
            name: "alpha",
            value: alpha,
            message: "satisfaction index must be a finite value >= 0",
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ModelError::BadParameter {
            name: "lambda",
            value: lambda,
            message: "weight must lie in [0, 1]",
        });
    }
    Ok(())
}

/// Build the standard LP for `(alpha, lambda)`.
///
/// Row order: `<=` rows are risk, cost, the `T` lower-shortfall rows, then the
/// `T` upper-shortfall rows; equality rows are the `n + 1` balance rows, then
/// the budget.
///
/// For `alpha > 1` the lower-deviation mean enters the risk row with a
/// negative weight, which an epigraph variable cannot represent. Its
/// coefficient is set to zero instead, giving a sound but conservative row:
/// every LP-feasible allocation still satisfies `sd >= alpha`.
pub fn build_plp2(
    problem: &PortfolioProblem,
    alpha: f64,
    lambda: f64,
) -> Result<StandardLP, ModelError> {
    check_parameters(alpha, lambda)?;
    let layout = Plp2Layout::of(problem);
    let (n, periods) = (layout.n, layout.periods);
    let nv = layout.n_vars();
    let universe = problem.universe();
    let history = universe.history();
    let tol = problem.risk_tolerance();
    let t_inv = 1.0 / periods as f64;

    let mut lp = StandardLP::new(nv);
    lp.var_names = layout.names();

    for (j, r) in universe.intervals().iter().enumerate() {
        lp.objective[layout.alloc(j)] = lambda * r.lower() + (1.0 - lambda) * r.upper();
    }
    lp.objective[layout.alloc(n)] = universe.risk_free_rate();
    lp.objective[layout.cost_bound()] = -1.0;

    for (i, &u) in problem.upper_bounds().iter().enumerate() {
        lp.var_upper[layout.alloc(i)] = u;
    }

    let lower_weight = if alpha <= 1.0 {
        (1.0 - alpha) * t_inv
    } else {
        0.0
    };
    let mut risk = vec![0.0; nv];
    for t in 0..periods {
        risk[layout.y_lower(t)] = lower_weight;
        risk[layout.y_upper(t)] = alpha * t_inv;
    }
    lp.add_le(
        "risk",
        risk,
        (1.0 - alpha) * tol.upper() + alpha * tol.lower(),
    );

    let mut cost = vec![0.0; nv];
    for (i, &k) in problem.transaction_rates().iter().enumerate() {
        cost[layout.d_plus(i)] = k;
        cost[layout.d_minus(i)] = k;
    }
    cost[layout.cost_bound()] = -1.0;
    lp.add_le("cost", cost, 0.0);

    for (upper_side, y) in [
        (
            false,
            Plp2Layout::y_lower as fn(&Plp2Layout, usize) -> usize,
        ),
        (true, Plp2Layout::y_upper),
    ] {
        for t in 0..periods {
            let mut row = vec![0.0; nv];
            for (j, r) in universe.intervals().iter().enumerate() {
                let expected = if upper_side { r.upper() } else { r.lower() };
                row[layout.alloc(j)] = expected - history.value(t, j);
            }
            row[y(&layout, t)] = -1.0;
            let side = if upper_side { "upper" } else { "lower" };
            lp.add_le(format!("shortfall_{side}{}", t + 1), row, 0.0);
        }
    }

    for (i, &x0) in problem.initial_holdings().iter().enumerate() {
        let mut row = vec![0.0; nv];
        row[layout.alloc(i)] = 1.0;
        row[layout.d_plus(i)] = -1.0;
        row[layout.d_minus(i)] = 1.0;
        lp.add_eq(format!("balance{}", i + 1), row, x0);
    }
    let mut budget = vec![0.0; nv];
    for i in 0..=n {
        budget[layout.alloc(i)] = 1.0;
    }
    lp.add_eq("budget", budget, 1.0);
    Ok(lp)
}

pub fn solve_portfolio(
    problem: &PortfolioProblem,
    alpha: f64,
    lambda: f64,
) -> Result<PortfolioSolution, ModelError> {
    solve_portfolio_with(problem, alpha, lambda, &SimplexOptions::default())
}

pub fn solve_portfolio_with(
    problem: &PortfolioProblem,
    alpha: f64,
    lambda: f64,
    opts: &SimplexOptions,
) -> Result<PortfolioSolution, ModelError> {
    let lp = build_plp2(problem, alpha, lambda)?;
    let result = solve_lp_with(&lp, opts)?;
    match result.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(ModelError::Unbounded),
        LpStatus::Infeasible => return Err(ModelError::Infeasible(diagnose(&lp, opts)?)),
    }

    let layout = Plp2Layout::of(problem);
    let n = layout.n;
    let z = &result.x;
    let x: Vec<f64> = z[..=n].to_vec();
    let slack = risk_constraint_slack(&x, problem, alpha);
    if slack < -opts.feas_tol * 10.0 {
        return Err(ModelError::Solver(LpError::Numerical {
            max_violation: -slack,
        }));
    }

    let risk = risk_interval(&x, problem.universe());
    Ok(PortfolioSolution {
        alpha,
        lambda,
        objective_value: result.objective,
        net_return_interval: net_return_interval(&x, problem),
        satisfaction_achieved: sd(risk, problem.risk_tolerance()),
        risk_interval: risk,
        transaction_cost: transaction_cost(&x, problem),
        auxiliary: Auxiliary {
            cost_bound: z[layout.cost_bound()],
            d_plus: (0..=n).map(|i| z[layout.d_plus(i)]).collect(),
            d_minus: (0..=n).map(|i| z[layout.d_minus(i)]).collect(),
            y_lower: (0..layout.periods).map(|t| z[layout.y_lower(t)]).collect(),
            y_upper: (0..layout.periods).map(|t| z[layout.y_upper(t)]).collect(),
        },
        iterations: result.iterations,
        x,
    })
}

/// Re-solve without the risk row to tell which constraint group is to blame.
fn diagnose(lp: &StandardLP, opts: &SimplexOptions) -> Result<InfeasibilityReason, ModelError> {
    let mut relaxed = lp.clone();
    relaxed.le_constraints.remove(0);
    relaxed.objective.iter_mut().for_each(|c| *c = 0.0);
    Ok(match solve_lp_with(&relaxed, opts)?.status {
        LpStatus::Infeasible => InfeasibilityReason::Bounds,
        _ => InfeasibilityReason::RiskTolerance,
    })
}
