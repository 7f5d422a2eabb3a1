//! JSON documents emitted by the CLI and the HTTP service.

use serde::{Deserialize, Serialize};

use super::config::ProblemConfig;
use super::{fingerprint, IoError};
use crate::estimation::{arithmetic_mean, asset_factors, ReturnFactors};
use crate::interval::Interval;
use crate::model::{PortfolioProblem, PortfolioSolution};

/// Label used for the last allocation entry.
pub const RISK_FREE_LABEL: &str = "risk-free";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetSummary {
    pub name: String,
    pub interval: Interval,
    pub factors: ReturnFactors,
}

/// Estimated universe, as printed by `estimate` and returned on problem upload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniverseSummary {
    pub n: usize,
    pub periods: usize,
    pub risk_free_rate: f64,
    pub risk_tolerance: Interval,
    pub assets: Vec<AssetSummary>,
}

impl UniverseSummary {
    pub fn new(problem: &PortfolioProblem, config: &ProblemConfig) -> Result<Self, IoError> {
        let universe = problem.universe();
        let history = universe.history();
        let assets = history
            .assets()
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let forecast = match &config.forecasts {
                    Some(f) => f[j],
                    None => arithmetic_mean(history, j),
                };
                Ok(AssetSummary {
                    name: name.clone(),
                    interval: universe.intervals()[j],
                    factors: asset_factors(history, j, forecast, config.m)?,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(UniverseSummary {
            n: universe.n(),
            periods: history.n_periods(),
            risk_free_rate: universe.risk_free_rate(),
            risk_tolerance: problem.risk_tolerance(),
            assets,
        })
    }
}

/// One solved portfolio with the asset labels of its allocation vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub fingerprint: String,
    /// `n` asset names followed by the risk-free label.
    pub assets: Vec<String>,
    pub solution: PortfolioSolution,
}

impl SolutionDocument {
    pub fn new(problem: &PortfolioProblem, solution: PortfolioSolution) -> Self {
        SolutionDocument {
            fingerprint: fingerprint(problem),
            assets: allocation_labels(problem),
            solution,
        }
    }
}

pub fn allocation_labels(problem: &PortfolioProblem) -> Vec<String> {
    let mut labels = problem.universe().history().assets().to_vec();
    labels.push(RISK_FREE_LABEL.to_string());
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::ReturnHistory;
    use crate::io::config::parse_config_str;
    use crate::model::solve_portfolio;

    #[test]
    fn summary_and_solution_documents() {
        let history = ReturnHistory::from_rows(vec![vec![0.01, 0.04], vec![0.03, 0.0]]).unwrap();
        let config = parse_config_str(
            r#"{"risk_free_rate": 0.001, "risk_tolerance": [0, 0.5], "m": 1, "forecasts": [0.05, 0.01]}"#,
        )
        .unwrap();
        let problem = config.build_problem(history).unwrap();
        let summary = UniverseSummary::new(&problem, &config).unwrap();
        assert_eq!((summary.n, summary.periods), (2, 2));
        assert_eq!(summary.assets[0].factors.r_f, 0.05);
        assert_eq!(
            summary.assets[0].interval,
            Interval::new(0.02, 0.05).unwrap()
        );
        assert_eq!(summary.assets[1].name, "A2");

        let solution = solve_portfolio(&problem, 0.5, 0.5).unwrap();
        let doc = SolutionDocument::new(&problem, solution);
        assert_eq!(doc.assets, ["A1", "A2", "risk-free"]);
        let text = serde_json::to_string(&doc).unwrap();
        let back: SolutionDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }
}
