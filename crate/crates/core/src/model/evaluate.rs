//! Closed-form evaluation of an allocation: costs, return and risk intervals.

use super::{AssetUniverse, PortfolioProblem};
use crate::interval::Interval;

fn check_len(x: &[f64], n: usize) {
    assert_eq!(x.len(), n + 1, "allocation needs n + 1 = {} entries", n + 1);
}

/// V-shaped rebalancing cost `sum k_i |x_i - x0_i|`.
pub fn transaction_cost(x: &[f64], problem: &PortfolioProblem) -> f64 {
    check_len(x, problem.n());
    x.iter()
        .zip(problem.initial_holdings())
        .zip(problem.transaction_rates())
        .map(|((xi, x0), k)| k * (xi - x0).abs())
        .sum()
}

/// Expected portfolio return before costs. The risk-free asset adds the same
/// amount to both endpoints.
pub fn gross_return_interval(x: &[f64], universe: &AssetUniverse) -> Interval {
    let n = universe.n();
    check_len(x, n);
    let (lo, hi) = universe
        .intervals()
        .iter()
        .zip(x)
        .fold((0.0, 0.0), |(lo, hi), (r, &w)| {
            (lo + r.lower() * w, hi + r.upper() * w)
        });
    let rf = universe.risk_free_rate() * x[n];
    Interval::new(lo + rf, hi + rf).expect("non-negative weights keep endpoints ordered")
}

pub fn net_return_interval(x: &[f64], problem: &PortfolioProblem) -> Interval {
    gross_return_interval(x, problem.universe()).shift(-transaction_cost(x, problem))
}

/// Raw period-`t` shortfalls `(sum (lower_j - r_tj) x_j, sum (upper_j - r_tj) x_j)`
/// before flooring at zero. Risky assets only.
pub(crate) fn period_shortfalls(x: &[f64], universe: &AssetUniverse, t: usize) -> (f64, f64) {
    let row = &universe.history().rows()[t];
    universe
        .intervals()
        .iter()
        .zip(row)
        .zip(x)
        .fold((0.0, 0.0), |(lo, hi), ((r, &rt), &w)| {
            (lo + (r.lower() - rt) * w, hi + (r.upper() - rt) * w)
        })
}

/// Semi-absolute deviation interval of period `t`.
pub fn deviation_interval_t(x: &[f64], universe: &AssetUniverse, t: usize) -> Interval {
    check_len(x, universe.n());
    let (lo, hi) = period_shortfalls(x, universe, t);
    Interval::new(lo.max(0.0), hi.max(0.0)).expect("upper shortfall dominates for x >= 0")
}

/// Period average of the deviation intervals.
pub fn risk_interval(x: &[f64], universe: &AssetUniverse) -> Interval {
    check_len(x, universe.n());
    let periods = universe.history().n_periods();
    let (lo, hi) = (0..periods)
        .map(|t| period_shortfalls(x, universe, t))
        .fold((0.0, 0.0), |(lo, hi), (l, h)| {
            (lo + l.max(0.0), hi + h.max(0.0))
        });
    let scale = periods as f64;
    Interval::new(lo / scale, hi / scale).expect("averaged endpoints stay ordered")
}

/// `rhs - lhs` of the crisp risk row; non-negative iff the row holds.
pub fn risk_constraint_slack(x: &[f64], problem: &PortfolioProblem, alpha: f64) -> f64 {
    let risk = risk_interval(x, problem.universe());
    let tol = problem.risk_tolerance();
    let lhs = (1.0 - alpha) * risk.lower() + alpha * risk.upper();
    let rhs = (1.0 - alpha) * tol.upper() + alpha * tol.lower();
    rhs - lhs
}

/// Crisp form of `sd(risk(x), tolerance) >= alpha`:
/// `(1-a) mean_lower + a mean_upper <= (1-a) w_hi + a w_lo`.
pub fn risk_constraint_holds(x: &[f64], problem: &PortfolioProblem, alpha: f64) -> bool {
    risk_constraint_slack(x, problem, alpha) >= 0.0
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::one_asset_problem;
    use super::*;
    use crate::estimation::ReturnHistory;
    use crate::interval::sd;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn close(a: Interval, b: Interval) -> bool {
        (a.lower() - b.lower()).abs() < 1e-12 && (a.upper() - b.upper()).abs() < 1e-12
    }

    fn two_asset_problem() -> PortfolioProblem {
        let history = ReturnHistory::from_rows(vec![vec![0.1]]).unwrap();
        let universe = AssetUniverse::new(vec![iv(0.05, 0.08)], 0.0, history).unwrap();
        PortfolioProblem::new(
            universe,
            vec![0.01, 0.02],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            iv(0.0, 0.1),
        )
        .unwrap()
    }

    #[test]
    fn cost_examples() {
        let p = two_asset_problem();
        assert_eq!(transaction_cost(&[0.5, 0.5], &p), 0.0);
        assert!((transaction_cost(&[0.8, 0.2], &p) - 0.009).abs() < 1e-15);
    }

    #[test]
    fn cost_risk_free_only() {
        let history = ReturnHistory::from_rows(vec![vec![0.0]]).unwrap();
        // a universe needs a risky column; give it zero weight throughout
        let universe = AssetUniverse::new(vec![Interval::point(0.0)], 0.0014, history).unwrap();
        let p = PortfolioProblem::new(
            universe,
            vec![0.0, 0.003],
            vec![0.0, 1.0],
            vec![1.0; 2],
            iv(0.0, 0.1),
        )
        .unwrap();
        assert_eq!(transaction_cost(&[0.0, 1.0], &p), 0.0);
        assert_eq!(
            gross_return_interval(&[0.0, 1.0], p.universe()),
            Interval::point(0.0014)
        );
    }

    #[test]
    fn net_return_shift() {
        let p = two_asset_problem();
        let x = [0.8, 0.2];
        let gross = gross_return_interval(&x, p.universe());
        assert!(close(gross, iv(0.04, 0.064)));
        let net = net_return_interval(&x, &p);
        assert!(close(net, iv(0.04 - 0.009, 0.064 - 0.009)));
        assert!((net.span() - gross.span()).abs() < 1e-15);
        assert_eq!(
            net_return_interval(&[0.5, 0.5], &p),
            gross_return_interval(&[0.5, 0.5], p.universe())
        );
    }

    #[test]
    fn deviation_examples() {
        let p = one_asset_problem(iv(0.0, 0.1));
        let u = p.universe();
        assert!(close(
            deviation_interval_t(&[1.0, 0.0], u, 0),
            iv(0.0, 0.03)
        ));
        assert_eq!(deviation_interval_t(&[1.0, 0.0], u, 1), iv(0.0, 0.0));
        assert_eq!(deviation_interval_t(&[0.0, 1.0], u, 0), iv(0.0, 0.0));
    }

    #[test]
    fn risk_examples() {
        let p = one_asset_problem(iv(0.0, 0.1));
        let u = p.universe();
        assert!(close(risk_interval(&[1.0, 0.0], u), iv(0.0, 0.015)));
        assert_eq!(risk_interval(&[0.0, 1.0], u), iv(0.0, 0.0));
        let h1 = ReturnHistory::from_rows(vec![vec![0.07]]).unwrap();
        let u1 = AssetUniverse::new(vec![iv(0.05, 0.10)], 0.0, h1).unwrap();
        assert_eq!(
            risk_interval(&[1.0, 0.0], &u1),
            deviation_interval_t(&[1.0, 0.0], &u1, 0)
        );
    }

    #[test]
    fn risk_constraint_examples() {
        let p = one_asset_problem(iv(0.01, 0.02));
        for alpha in [0.0, 0.3, 1.0, 1.7] {
            assert!(risk_constraint_holds(&[0.0, 1.0], &p, alpha));
        }
        // alpha = 0 keeps only the lower-deviation mean against the upper tolerance
        let x = [1.0, 0.0];
        assert!(risk_constraint_holds(&x, &p, 0.0));
        // risk [0, 0.015] vs [0.01, 0.02]: sd = 0.02 / 0.025 = 0.8
        assert!(risk_constraint_holds(&x, &p, 0.8 - 1e-9));
        assert!(!risk_constraint_holds(&x, &p, 0.8 + 1e-9));
        assert!((sd(risk_interval(&x, p.universe()), p.risk_tolerance()) - 0.8).abs() < 1e-12);
    }
}
