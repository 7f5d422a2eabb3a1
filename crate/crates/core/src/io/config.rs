//! Problem configuration documents (JSON).
//!
//! ```json
//! {
//!   "risk_free_rate": 0.0014,
//!   "risk_tolerance": [0.015, 0.040],
//!   "m": 5,
//!   "forecasts": [0.10, 0.056],
//!   "k": [0.003, 0.003, 0.001],
//!   "x0": [0, 0, 1],
//!   "u": [0.6, 0.6, 1]
//! }
//! ```
//!
//! Only `risk_free_rate` and `risk_tolerance` are required. The tolerance may
//! also be written as `{"lower": .., "upper": ..}`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::IoError;
use crate::estimation::{
    arithmetic_mean, estimate_universe, EstimationError, ReturnHistory, DEFAULT_TENDENCY_WINDOW,
};
use crate::interval::Interval;
use crate::model::{ModelError, PortfolioProblem};

const FIELDS: [&str; 7] = [
    "risk_free_rate",
    "risk_tolerance",
    "m",
    "forecasts",
    "k",
    "x0",
    "u",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub risk_free_rate: f64,
    pub risk_tolerance: Interval,
    pub m: usize,
    /// Per-asset forecast factors. Without them each interval spans only the
    /// mean and tendency factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forecasts: Option<Vec<f64>>,
    /// Transaction rates, `n + 1` entries. Default: zeros.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    /// Initial holdings, `n + 1` entries. Default: all in the risk-free asset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Upper bounds, `n + 1` entries. Default: ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ToleranceInput {
    Pair([f64; 2]),
    Object { lower: f64, upper: f64 },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn take<T: DeserializeOwned>(
    obj: &Map<String, Value>,
    field: &'static str,
) -> Result<Option<T>, IoError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => T::deserialize(v)
            .map(Some)
            .map_err(|e| schema(field, e.to_string())),
    }
}

fn require<T: DeserializeOwned>(
    obj: &Map<String, Value>,
    field: &'static str,
) -> Result<T, IoError> {
    take(obj, field)?.ok_or_else(|| schema(field, "missing required field"))
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ProblemConfig, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ProblemConfig, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config_from_value(&value)
}

pub fn config_from_value(value: &Value) -> Result<ProblemConfig, IoError> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema("<root>", "config must be a JSON object"))?;
    if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(schema(unknown.clone(), "unknown field"));
    }

    let risk_free_rate: f64 = require(obj, "risk_free_rate")?;
    let (lower, upper) = match require::<ToleranceInput>(obj, "risk_tolerance")? {
        ToleranceInput::Pair([lo, hi]) => (lo, hi),
        ToleranceInput::Object { lower, upper } => (lower, upper),
    };
    let risk_tolerance =
        Interval::new(lower, upper).map_err(|e| schema("risk_tolerance", e.to_string()))?;
    if lower < 0.0 {
        return Err(schema(
            "risk_tolerance",
            "lower tolerated risk must be non-negative",
        ));
    }
    let config = ProblemConfig {
        risk_free_rate,
        risk_tolerance,
        m: take(obj, "m")?.unwrap_or(DEFAULT_TENDENCY_WINDOW),
        forecasts: take(obj, "forecasts")?,
        k: take(obj, "k")?,
        x0: take(obj, "x0")?,
        u: take(obj, "u")?,
    };
    config.validate()?;
    Ok(config)
}

impl ProblemConfig {
    /// Checks that do not need the history.
    pub fn validate(&self) -> Result<(), IoError> {
        if !self.risk_free_rate.is_finite() {
            return Err(schema("risk_free_rate", "must be finite"));
        }
        if self.m == 0 {
            return Err(schema("m", "tendency window must be at least 1"));
        }
        let lists = [
            ("forecasts", &self.forecasts),
            ("k", &self.k),
            ("x0", &self.x0),
            ("u", &self.u),
        ];
        for (field, list) in lists {
            if let Some(v) = list {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(schema(field, "entries must be finite"));
                }
            }
        }
        if let Some(k) = &self.k {
            if k.iter().any(|&v| v < 0.0) {
                return Err(schema("k", "transaction rates must be non-negative"));
            }
        }
        if let Some(x0) = &self.x0 {
            if x0.iter().any(|&v| v < 0.0) {
                return Err(schema("x0", "initial holdings must be non-negative"));
            }
        }
        if let Some(u) = &self.u {
            if u.iter().any(|&v| v <= 0.0 || v > 1.0) {
                return Err(schema("u", "upper bounds must lie in (0, 1]"));
            }
        }
        // the n + 1 lists must agree with each other and with forecasts (n)
        let mut expected: Option<(usize, &str)> =
            self.forecasts.as_ref().map(|f| (f.len() + 1, "forecasts"));
        for (field, list) in [("k", &self.k), ("x0", &self.x0), ("u", &self.u)] {
            if let Some(v) = list {
                match expected {
                    Some((len, from)) if v.len() != len => {
                        return Err(schema(
                            field,
                            format!("has {} entries but {from} implies {len}", v.len()),
                        ));
                    }
                    None => expected = Some((v.len(), field)),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Estimate intervals from `history` and assemble the problem.
    pub fn build_problem(&self, history: ReturnHistory) -> Result<PortfolioProblem, IoError> {
        self.validate()?;
        let n = history.n_assets();
        let check_len = |field: &'static str, v: &Option<Vec<f64>>, len: usize| match v {
            Some(v) if v.len() != len => Err(schema(
                field,
                format!("expected {len} entries for {n} assets, found {}", v.len()),
            )),
            _ => Ok(()),
        };
        check_len("forecasts", &self.forecasts, n)?;
        check_len("k", &self.k, n + 1)?;
        check_len("x0", &self.x0, n + 1)?;
        check_len("u", &self.u, n + 1)?;

        // a forecast equal to the mean leaves the hull of (mean, tendency) unchanged
        let forecasts = self
            .forecasts
            .clone()
            .unwrap_or_else(|| (0..n).map(|j| arithmetic_mean(&history, j)).collect());
        let universe = estimate_universe(history, &forecasts, self.m, self.risk_free_rate)
            .map_err(|e| match e {
                EstimationError::WindowTooLarge { .. } | EstimationError::EmptyWindow => {
                    schema("m", e.to_string())
                }
                other => IoError::Estimation(other),
            })?;

        let k = self.k.clone().unwrap_or_else(|| vec![0.0; n + 1]);
        let x0 = self.x0.clone().unwrap_or_else(|| {
            let mut v = vec![0.0; n + 1];
            v[n] = 1.0;
            v
        });
        let u = self.u.clone().unwrap_or_else(|| vec![1.0; n + 1]);
        PortfolioProblem::new(universe, k, x0, u, self.risk_tolerance).map_err(|e| match e {
            ModelError::InvalidProblem { field, message } => schema(field, message),
            other => IoError::Model(other),
        })
    }
}
