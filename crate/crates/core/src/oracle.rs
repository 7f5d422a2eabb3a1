//! Brute-force reference solvers for small instances.
//!
//! Both are exponential and meant only for cross-checking the simplex solver
//! and the portfolio LP on toy sizes.

use crate::estimation::{estimate_universe, ReturnHistory};
use crate::interval::Interval;
use crate::lp::{verify_solution, StandardLP};
use crate::model::{
    gross_return_interval, risk_constraint_holds, transaction_cost, PortfolioProblem,
};

/// Best objective over all basic feasible solutions of `lp`, found by
/// enumerating every choice of active inequality constraints.
///
/// Needs finite bounds on every variable so the feasible set is a polytope.
/// Returns `None` when no vertex is feasible at `tol`.
pub fn enumerate_vertices(lp: &StandardLP, tol: f64) -> Option<(f64, Vec<f64>)> {
    let n = lp.n_vars();
    assert!(
        lp.var_lower
            .iter()
            .chain(&lp.var_upper)
            .all(|b| b.is_finite()),
        "vertex enumeration needs finite bounds"
    );
    let mut candidates: Vec<(Vec<f64>, f64)> = lp
        .le_constraints
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs))
        .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        candidates.push((e.clone(), lp.var_lower[j]));
        candidates.push((e, lp.var_upper[j]));
    }
    let fixed: Vec<(Vec<f64>, f64)> = lp
        .eq_constraints
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs))
        .collect();
    if fixed.len() > n {
        return None;
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut chosen = Vec::with_capacity(n);
    let need = n - fixed.len();
    let mut visit = |active: &[usize]| {
        let mut a: Vec<Vec<f64>> = fixed.iter().map(|(c, _)| c.clone()).collect();
        let mut b: Vec<f64> = fixed.iter().map(|(_, r)| *r).collect();
        for &i in active {
            a.push(candidates[i].0.clone());
            b.push(candidates[i].1);
        }
        let Some(x) = solve_square(a, b) else { return };
        if !verify_solution(lp, &x, tol).is_feasible() {
            return;
        }
        let value = lp.objective_value(&x);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, x));
        }
    };
    combinations(candidates.len(), need, 0, &mut chosen, &mut visit);
    best
}

fn combinations(
    total: usize,
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    let remaining = k - chosen.len();
    if start + remaining > total {
        return;
    }
    for i in start..=total - remaining {
        chosen.push(i);
        combinations(total, k, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (done, rest) = a.split_at_mut(col + 1);
        let pivot = &done[col];
        let b_pivot = b[col];
        for (row, bi) in rest.iter_mut().zip(&mut b[col + 1..]) {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (v, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *v -= f * p;
                }
                *bi -= f * b_pivot;
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Scalarized portfolio objective `lambda * lower + (1 - lambda) * upper` of
/// the net return interval.
pub fn portfolio_objective(problem: &PortfolioProblem, x: &[f64], lambda: f64) -> f64 {
    let gross = gross_return_interval(x, problem.universe());
    lambda * gross.lower() + (1.0 - lambda) * gross.upper() - transaction_cost(x, problem)
}

/// Best allocation on the lattice `{x : x_i = k_i * step, sum x = 1}` that
/// respects the upper bounds and the crisp risk row at `alpha`.
///
/// # Panics
/// If `1 / step` is not (close to) an integer.
pub fn grid_search(
    problem: &PortfolioProblem,
    alpha: f64,
    lambda: f64,
    step: f64,
) -> Option<(f64, Vec<f64>)> {
    let units = (1.0 / step).round() as usize;
    assert!(
        (units as f64 * step - 1.0).abs() < 1e-9,
        "step must divide 1"
    );
    let parts = problem.n() + 1;
    let mut counts = vec![0usize; parts];
    let mut best: Option<(f64, Vec<f64>)> = None;
    compositions(units, 0, &mut counts, &mut |counts| {
        let x: Vec<f64> = counts.iter().map(|&c| c as f64 / units as f64).collect();
        if x.iter()
            .zip(problem.upper_bounds())
            .any(|(xi, u)| *xi > u + 1e-12)
        {
            return;
        }
        if !risk_constraint_holds(&x, problem, alpha) {
            return;
        }
        let value = portfolio_objective(problem, &x, lambda);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, x));
        }
    });
    best
}

fn compositions(left: usize, pos: usize, counts: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        visit(counts);
        return;
    }
    for c in 0..=left {
        counts[pos] = c;
        compositions(left - c, pos + 1, counts, visit);
    }
}

/// Random LP with at most `max_vars` variables, finite bounds, up to four
/// `<=` rows and up to two equalities, all built around a random point inside
/// the bounds so the instance is feasible and bounded.
pub fn random_lp(max_vars: usize, uniform: &mut impl FnMut() -> f64) -> StandardLP {
    let mut between = |lo: f64, hi: f64| lo + (hi - lo) * uniform();
    let n = 1 + (between(0.0, max_vars as f64) as usize).min(max_vars - 1);
    let mut lp = StandardLP::new(n);
    lp.objective = (0..n).map(|_| between(-5.0, 5.0)).collect();
    lp.var_lower = (0..n)
        .map(|_| {
            if between(0.0, 1.0) < 0.3 {
                between(-3.0, 0.0)
            } else {
                0.0
            }
        })
        .collect();
    lp.var_upper = lp.var_lower.iter().map(|l| l + between(0.5, 6.0)).collect();
    let point: Vec<f64> = lp
        .var_lower
        .iter()
        .zip(&lp.var_upper)
        .map(|(l, u)| between(*l, *u))
        .collect();
    let dot = |c: &[f64]| c.iter().zip(&point).map(|(a, b)| a * b).sum::<f64>();

    let le_rows = between(0.0, 5.0) as usize;
    for i in 0..le_rows {
        let coeffs: Vec<f64> = (0..n).map(|_| between(-3.0, 3.0)).collect();
        let rhs = dot(&coeffs) + between(0.0, 2.0);
        lp.add_le(format!("le{i}"), coeffs, rhs);
    }
    let eq_rows = (between(0.0, 3.0) as usize).min(n - 1);
    for i in 0..eq_rows {
        let coeffs: Vec<f64> = (0..n).map(|_| between(-3.0, 3.0)).collect();
        let rhs = dot(&coeffs);
        lp.add_eq(format!("eq{i}"), coeffs, rhs);
    }
    lp
}

/// Random problem with `n` risky assets and `periods` history rows, drawn
/// from `uniform` (values in `[0, 1)`). Transaction rates lie in `[0, k_max]`.
///
/// Holding only the risk-free asset is always allowed (`u = 1` there), so
/// every instance is feasible for `alpha` in `[0, 1]`.
pub fn random_problem(
    n: usize,
    periods: usize,
    k_max: f64,
    uniform: &mut impl FnMut() -> f64,
) -> PortfolioProblem {
    let mut between = |lo: f64, hi: f64| lo + (hi - lo) * uniform();
    let rows: Vec<Vec<f64>> = (0..periods)
        .map(|_| (0..n).map(|_| between(-0.10, 0.15)).collect())
        .collect();
    let forecasts: Vec<f64> = (0..n).map(|_| between(-0.02, 0.12)).collect();
    let window = 1 + (between(0.0, periods as f64) as usize).min(periods - 1);
    let rf = between(0.0, 0.005);
    let history = ReturnHistory::from_rows(rows).expect("finite rows");
    let universe = estimate_universe(history, &forecasts, window, rf).expect("valid inputs");

    let k: Vec<f64> = (0..=n).map(|_| between(0.0, k_max)).collect();
    let weights: Vec<f64> = (0..=n).map(|_| between(0.0, 1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut x0: Vec<f64> = weights.iter().map(|w| w / total).collect();
    x0[n] = (1.0 - x0[..n].iter().sum::<f64>()).max(0.0);
    let mut u: Vec<f64> = (0..n).map(|_| between(0.3, 1.0)).collect();
    u.push(1.0);
    let w_lo = between(0.0, 0.02);
    let tolerance = Interval::new(w_lo, w_lo + between(0.0, 0.03)).expect("ordered");
    PortfolioProblem::new(universe, k, x0, u, tolerance).expect("valid problem")
}
