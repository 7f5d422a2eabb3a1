//! Two-phase primal simplex on a dense tableau with native variable bounds.
//!
//! Internally every column lives in `[0, ub]` (`ub` possibly infinite);
//! original bounds are removed by shifting, reflecting, or splitting free
//! variables. Nonbasic columns sit at either bound. Pricing is
//! largest-reduced-cost until the objective stalls for `2 * rows`
//! iterations, then Bland's rule for the rest of the phase.

use super::{
    verify_solution, LpError, LpResult, LpStatus, StandardLP, DEFAULT_FEAS_TOL,
    DEFAULT_MAX_ITERATIONS, DEFAULT_OPT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Cap on pivots plus bound flips across both phases.
    pub max_iterations: usize,
    /// Smallest tableau entry accepted as a pivot.
    pub pivot_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feas_tol: DEFAULT_FEAS_TOL,
            opt_tol: DEFAULT_OPT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            pivot_tol: 1e-9,
        }
    }
}

pub fn solve_lp(lp: &StandardLP, feas_tol: f64, opt_tol: f64) -> Result<LpResult, LpError> {
    solve_lp_with(
        lp,
        &SimplexOptions {
            feas_tol,
            opt_tol,
            ..SimplexOptions::default()
        },
    )
}

pub fn solve_lp_with(lp: &StandardLP, opts: &SimplexOptions) -> Result<LpResult, LpError> {
    lp.validate()?;
    let (mut tab, maps) = Tableau::build(lp);
    let mut iterations = 0;

    if tab.has_artificials() {
        tab.set_phase_one_costs();
        let outcome = tab.run(opts, 1, &mut iterations)?;
        debug_assert_eq!(
            outcome,
            Outcome::Optimal,
            "phase one is bounded below by zero"
        );
        let scale = tab.rhs.iter().fold(1.0f64, |m, b| m.max(b.abs()));
        if tab.artificial_sum() > opts.feas_tol * scale {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::NAN,
                iterations,
            });
        }
        tab.retire_artificials(opts.pivot_tol);
    }

    tab.set_phase_two_costs();
    if tab.run(opts, 2, &mut iterations)? == Outcome::Unbounded {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: f64::INFINITY,
            iterations,
        });
    }

    let z = tab.refined_values();
    let x: Vec<f64> = maps.iter().map(|m| m.recover(&z)).collect();
    let report = verify_solution(lp, &x, opts.feas_tol);
    if !report.is_feasible() {
        return Err(LpError::Numerical {
            max_violation: report.max_violation,
        });
    }
    Ok(LpResult {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&x),
        x,
        iterations,
    })
}

/// How an original variable is recovered from internal columns.
#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    /// `x = lower + z[col]`
    Shifted { col: usize, lower: f64 },
    /// `x = upper - z[col]`
    Reflected { col: usize, upper: f64 },
    /// `x = z[pos] - z[neg]`
    Split { pos: usize, neg: usize },
}

impl ColumnMap {
    fn recover(&self, z: &[f64]) -> f64 {
        match *self {
            ColumnMap::Shifted { col, lower } => lower + z[col],
            ColumnMap::Reflected { col, upper } => upper - z[col],
            ColumnMap::Split { pos, neg } => z[pos] - z[neg],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Current `B^-1 A`, row-major.
    a: Vec<f64>,
    /// Constraint matrix after sign normalization, row-major. Used for refinement.
    orig: Vec<f64>,
    /// Right-hand side after bound shifts and sign normalization.
    rhs: Vec<f64>,
    /// Values of the basic variables, by row.
    beta: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    structural_cost: Vec<f64>,
    reduced: Vec<f64>,
    artificial: Vec<bool>,
    frozen: Vec<bool>,
}

impl Tableau {
    fn build(lp: &StandardLP) -> (Self, Vec<ColumnMap>) {
        let rows: Vec<_> = lp.eq_constraints.iter().chain(&lp.le_constraints).collect();
        let m = rows.len();
        let n_eq = lp.eq_constraints.len();
        let mut rhs: Vec<f64> = rows.iter().map(|r| r.rhs).collect();

        // columns stored as (entries by row, cost, upper)
        let mut columns: Vec<(Vec<f64>, f64, f64)> = Vec::new();
        let mut maps = Vec::with_capacity(lp.n_vars());
        for j in 0..lp.n_vars() {
            let col: Vec<f64> = rows.iter().map(|r| r.coeffs[j]).collect();
            let (lo, hi, c) = (lp.var_lower[j], lp.var_upper[j], lp.objective[j]);
            if lo.is_finite() {
                for (b, a) in rhs.iter_mut().zip(&col) {
                    *b -= a * lo;
                }
                maps.push(ColumnMap::Shifted {
                    col: columns.len(),
                    lower: lo,
                });
                columns.push((col, c, hi - lo));
            } else if hi.is_finite() {
                for (b, a) in rhs.iter_mut().zip(&col) {
                    *b -= a * hi;
                }
                maps.push(ColumnMap::Reflected {
                    col: columns.len(),
                    upper: hi,
                });
                columns.push((col.iter().map(|a| -a).collect(), -c, f64::INFINITY));
            } else {
                let pos = columns.len();
                maps.push(ColumnMap::Split { pos, neg: pos + 1 });
                let neg_col = col.iter().map(|a| -a).collect();
                columns.push((col, c, f64::INFINITY));
                columns.push((neg_col, -c, f64::INFINITY));
            }
        }
        let n_structural = columns.len();
        for i in n_eq..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            columns.push((e, 0.0, f64::INFINITY));
        }

        let flipped: Vec<bool> = rhs.iter().map(|&b| b < 0.0).collect();
        // slack of row i (i >= n_eq) is column n_structural + i - n_eq
        let mut basis = vec![usize::MAX; m];
        for i in n_eq..m {
            if !flipped[i] {
                basis[i] = n_structural + i - n_eq;
            }
        }
        let mut artificial = vec![false; columns.len()];
        for (i, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                let mut e = vec![0.0; m];
                e[i] = if flipped[i] { -1.0 } else { 1.0 };
                *slot = columns.len();
                columns.push((e, 0.0, f64::INFINITY));
                artificial.push(true);
            }
        }

        let ncols = columns.len();
        let mut orig = vec![0.0; m * ncols];
        for (j, (col, _, _)) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                orig[i * ncols + j] = if flipped[i] { -v } else { v };
            }
        }
        for (b, &f) in rhs.iter_mut().zip(&flipped) {
            if f {
                *b = -*b;
            }
        }

        let mut in_basis = vec![false; ncols];
        for &b in &basis {
            in_basis[b] = true;
        }
        let tab = Tableau {
            m,
            ncols,
            a: orig.clone(),
            beta: rhs.clone(),
            orig,
            rhs,
            basis,
            in_basis,
            at_upper: vec![false; ncols],
            upper: columns.iter().map(|c| c.2).collect(),
            cost: vec![0.0; ncols],
            structural_cost: columns.iter().map(|c| c.1).collect(),
            reduced: vec![0.0; ncols],
            artificial,
            frozen: vec![false; ncols],
        };
        (tab, maps)
    }

    fn has_artificials(&self) -> bool {
        self.artificial.iter().any(|&a| a)
    }

    fn artificial_sum(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.beta)
            .filter(|(&b, _)| self.artificial[b])
            .map(|(_, v)| v.abs())
            .sum()
    }

    fn set_phase_one_costs(&mut self) {
        for j in 0..self.ncols {
            self.cost[j] = if self.artificial[j] { -1.0 } else { 0.0 };
        }
        self.recompute_reduced();
    }

    fn set_phase_two_costs(&mut self) {
        self.cost.copy_from_slice(&self.structural_cost);
        self.recompute_reduced();
    }

    fn recompute_reduced(&mut self) {
        self.reduced.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.ncols..(i + 1) * self.ncols];
                for (d, &t) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * t;
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    fn value_of_nonbasic(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    /// Pivot artificials out of the basis where possible; freeze the rest at zero.
    fn retire_artificials(&mut self, pivot_tol: f64) {
        for r in 0..self.m {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            let row = &self.a[r * self.ncols..(r + 1) * self.ncols];
            let best = (0..self.ncols)
                .filter(|&j| !self.artificial[j] && !self.in_basis[j])
                .map(|j| (j, row[j].abs()))
                .filter(|&(_, v)| v > pivot_tol)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((j, _)) = best {
                let leaving = self.basis[r];
                self.at_upper[leaving] = false;
                self.beta[r] = self.value_of_nonbasic(j);
                self.pivot(r, j);
            }
        }
        for j in 0..self.ncols {
            if self.artificial[j] {
                self.upper[j] = 0.0;
                self.frozen[j] = true;
            }
        }
    }

    fn run(
        &mut self,
        opts: &SimplexOptions,
        phase: u8,
        iterations: &mut usize,
    ) -> Result<Outcome, LpError> {
        let stall_limit = (2 * self.m).max(1);
        let mut bland = false;
        let mut stalled = 0usize;
        loop {
            let Some((j, dir, gain)) = self.choose_entering(opts.opt_tol, bland) else {
                return Ok(Outcome::Optimal);
            };
            if *iterations >= opts.max_iterations {
                return Err(LpError::IterationLimit {
                    iterations: *iterations,
                    phase,
                });
            }
            *iterations += 1;

            let step = self.ratio_test(j, dir, opts.pivot_tol, bland);
            let theta = match step {
                Step::Unbounded => return Ok(Outcome::Unbounded),
                Step::Flip(theta) | Step::Pivot { theta, .. } => theta,
            };

            for i in 0..self.m {
                let t = self.a[i * self.ncols + j];
                if t != 0.0 {
                    self.beta[i] -= dir * theta * t;
                }
            }
            match step {
                Step::Flip(_) => self.at_upper[j] = !self.at_upper[j],
                Step::Pivot { row, to_upper, .. } => {
                    let entering_value = self.value_of_nonbasic(j) + dir * theta;
                    let leaving = self.basis[row];
                    self.at_upper[leaving] = to_upper;
                    self.at_upper[j] = false;
                    self.beta[row] = entering_value;
                    self.pivot(row, j);
                }
                Step::Unbounded => unreachable!(),
            }

            if theta * gain > opts.opt_tol {
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= stall_limit {
                    bland = true;
                }
            }
        }
    }

    /// Entering column, its direction (+1 up from lower, -1 down from upper) and `|d_j|`.
    fn choose_entering(&self, opt_tol: f64, bland: bool) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols {
            if self.in_basis[j] || self.frozen[j] {
                continue;
            }
            let d = self.reduced[j];
            let dir = if !self.at_upper[j] && d > opt_tol && self.upper[j] > 0.0 {
                1.0
            } else if self.at_upper[j] && d < -opt_tol {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir, d.abs()));
            }
            if best.is_none_or(|(_, _, g)| d.abs() > g) {
                best = Some((j, dir, d.abs()));
            }
        }
        best
    }

    fn ratio_test(&self, j: usize, dir: f64, pivot_tol: f64, bland: bool) -> Step {
        // (row, limit, |alpha|, leaves at upper)
        let mut candidates: Vec<(usize, f64, f64, bool)> = Vec::new();
        for i in 0..self.m {
            let alpha = dir * self.a[i * self.ncols + j];
            let b = self.basis[i];
            if alpha > pivot_tol {
                candidates.push((i, (self.beta[i] / alpha).max(0.0), alpha, false));
            } else if alpha < -pivot_tol && self.upper[b].is_finite() {
                let room = (self.upper[b] - self.beta[i]).max(0.0);
                candidates.push((i, room / -alpha, -alpha, true));
            }
        }
        let row_min = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let flip = self.upper[j];
        if flip <= row_min {
            return if flip.is_finite() {
                Step::Flip(flip)
            } else {
                Step::Unbounded
            };
        }
        let tie = row_min + 1e-12 * (1.0 + row_min.abs());
        let chosen = candidates
            .iter()
            .filter(|c| c.1 <= tie)
            .min_by(|x, y| {
                if bland {
                    self.basis[x.0].cmp(&self.basis[y.0])
                } else {
                    y.2.total_cmp(&x.2)
                }
            })
            .expect("finite row minimum has a candidate");
        Step::Pivot {
            row: chosen.0,
            theta: chosen.1,
            to_upper: chosen.3,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let nc = self.ncols;
        let p = self.a[r * nc + j];
        for v in &mut self.a[r * nc..(r + 1) * nc] {
            *v /= p;
        }
        self.a[r * nc + j] = 1.0;
        let pivot_row: Vec<f64> = self.a[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * nc + j];
            if f != 0.0 {
                let row = &mut self.a[i * nc..(i + 1) * nc];
                for (v, &pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                row[j] = 0.0;
            }
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for (d, &pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *d -= f * pr;
            }
        }
        self.reduced[j] = 0.0;

        let leaving = self.basis[r];
        self.in_basis[leaving] = false;
        self.in_basis[j] = true;
        self.basis[r] = j;
    }

    /// Column values with the basic part re-solved from the original matrix.
    fn refined_values(&self) -> Vec<f64> {
        let mut z: Vec<f64> = (0..self.ncols)
            .map(|j| {
                if self.in_basis[j] {
                    0.0
                } else {
                    self.value_of_nonbasic(j)
                }
            })
            .collect();
        let nc = self.ncols;
        let mut residual = self.rhs.clone();
        for (i, r) in residual.iter_mut().enumerate() {
            for (j, zj) in z.iter().enumerate() {
                if *zj != 0.0 {
                    *r -= self.orig[i * nc + j] * zj;
                }
            }
        }
        let basis_matrix: Vec<Vec<f64>> = (0..self.m)
            .map(|i| self.basis.iter().map(|&b| self.orig[i * nc + b]).collect())
            .collect();
        match solve_dense(basis_matrix, residual) {
            Some(xb) => {
                for (&b, v) in self.basis.iter().zip(xb) {
                    z[b] = v;
                }
            }
            None => {
                for (&b, &v) in self.basis.iter().zip(&self.beta) {
                    z[b] = v;
                }
            }
        }
        z
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Unbounded,
    /// Entering column moves to its opposite bound without a basis change.
    Flip(f64),
    Pivot {
        row: usize,
        theta: f64,
        to_upper: bool,
    },
}

/// Gaussian elimination with partial pivoting. `None` if numerically singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))?;
        if a[p][k].abs() < 1e-13 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        let (done, rest) = a.split_at_mut(k + 1);
        let pivot = &done[k];
        let bk = b[k];
        for (row, bi) in rest.iter_mut().zip(&mut b[k + 1..]) {
            let f = row[k] / pivot[k];
            if f != 0.0 {
                for (v, p) in row[k..].iter_mut().zip(&pivot[k..]) {
                    *v -= f * p;
                }
                *bi -= f * bk;
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tight_constraint() {
        let mut lp = StandardLP::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_le("cap", vec![1.0, 1.0], 1.0);
        let res = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_without_upper_restriction() {
        let mut lp = StandardLP::new(1);
        lp.objective = vec![1.0];
        let res = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(res.status, LpStatus::Unbounded);
        assert!(res.x.is_empty());
    }

    #[test]
    fn budget_with_upper_bounds() {
        let mut lp = StandardLP::new(2);
        lp.objective = vec![3.0, 2.0];
        lp.var_upper = vec![0.6, 0.8];
        lp.add_eq("budget", vec![1.0, 1.0], 1.0);
        let res = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.x[0] - 0.6).abs() < 1e-12 && (res.x[1] - 0.4).abs() < 1e-12);
        assert!((res.objective - 2.6).abs() < 1e-12);
    }

    #[test]
    fn infeasible_rows() {
        let mut lp = StandardLP::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add_le("a", vec![1.0, 1.0], 1.0);
        lp.add_le("b", vec![-1.0, -1.0], -2.0);
        assert_eq!(
            solve_lp(&lp, 1e-9, 1e-9).unwrap().status,
            LpStatus::Infeasible
        );
    }

    #[test]
    fn infeasible_against_bounds() {
        let mut lp = StandardLP::new(2);
        lp.var_upper = vec![0.3, 0.3];
        lp.add_eq("budget", vec![1.0, 1.0], 1.0);
        assert_eq!(
            solve_lp(&lp, 1e-9, 1e-9).unwrap().status,
            LpStatus::Infeasible
        );
    }

    #[test]
    fn free_and_reflected_variables() {
        // max -|x0 - 2| style: x0 free, x1 in (-inf, 5], x0 + x1 = 3, max x0 - 2 x1 with x0 <= 10 via row
        let mut lp = StandardLP::new(2);
        lp.objective = vec![1.0, -2.0];
        lp.var_lower = vec![f64::NEG_INFINITY, f64::NEG_INFINITY];
        lp.var_upper = vec![f64::INFINITY, 5.0];
        lp.add_eq("sum", vec![1.0, 1.0], 3.0);
        lp.add_le("cap", vec![1.0, 0.0], 10.0);
        let res = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.x[0] - 10.0).abs() < 1e-9);
        assert!((res.x[1] + 7.0).abs() < 1e-9);
        assert!((res.objective - 24.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = StandardLP::new(2);
        lp.objective = vec![1.0, 2.0];
        lp.var_upper = vec![1.0, 1.0];
        lp.add_eq("e1", vec![1.0, 1.0], 1.0);
        lp.add_eq("e2", vec![2.0, 2.0], 2.0);
        let res = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert!((res.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_lower_bounds_shift() {
        let mut lp = StandardLP::new(1);
        lp.objective = vec![-1.0];
        lp.var_lower = vec![-3.0];
        lp.var_upper = vec![4.0];
        let res = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(res.x, vec![-3.0]);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let mut lp = StandardLP::new(3);
        lp.objective = vec![1.0, 1.0, 1.0];
        lp.add_le("r", vec![1.0, 2.0, 3.0], 4.0);
        lp.add_eq("e", vec![1.0, 1.0, 0.0], 1.0);
        let opts = SimplexOptions {
            max_iterations: 0,
            ..SimplexOptions::default()
        };
        assert!(matches!(
            solve_lp_with(&lp, &opts),
            Err(LpError::IterationLimit { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let mut lp = StandardLP::new(3);
        lp.objective = vec![0.3, 0.5, 0.2];
        lp.var_upper = vec![0.5, 0.5, 1.0];
        lp.add_eq("budget", vec![1.0, 1.0, 1.0], 1.0);
        lp.add_le("risk", vec![0.2, 0.4, 0.0], 0.15);
        let a = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        let b = solve_lp(&lp, 1e-9, 1e-9).unwrap();
        assert_eq!(a, b);
    }
}
