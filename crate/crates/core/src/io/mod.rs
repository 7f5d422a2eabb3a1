//! File formats: return histories (CSV), problem configs and result documents (JSON).

pub mod config;
pub mod documents;
pub mod history;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::estimation::EstimationError;
use crate::model::{ModelError, PortfolioProblem};

pub use config::{parse_config, parse_config_str, ProblemConfig};
pub use documents::{AssetSummary, SolutionDocument, UniverseSummary};
pub use history::{parse_history, parse_history_str, write_history};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: value is not finite")]
    NonFiniteValue { line: usize, column: usize },
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Hex SHA-256 of the problem's canonical JSON form.
pub fn fingerprint(problem: &PortfolioProblem) -> String {
    let bytes = serde_json::to_vec(problem).expect("problem serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Serde adapter for floats that may be infinite. Infinities are written as
/// the strings `"inf"` / `"-inf"`; finite values stay plain numbers.
pub mod extended_f64 {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_infinite() {
            s.serialize_str(if *value > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct ExtendedVisitor;

        impl Visitor<'_> for ExtendedVisitor {
            type Value = f64;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        d.deserialize_any(ExtendedVisitor)
    }
}
