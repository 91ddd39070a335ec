//! Parse constrained model output into a causal map.
//!
//! Structured outputs guarantee JSON, not sanity: names get normalized,
//! duplicate (from, to) pairs merge with a warning, and a relationship
//! naming an undeclared variable is repaired by declaring it.

use serde_json::Value;
use thiserror::Error;

use sd_eval_core::graph::{CausalMap, GraphError, MapWarning, WireMap};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("document violates the causal-map schema: {0}")]
    Schema(String),
}

pub fn parse_structured_map(raw: &str) -> Result<(CausalMap, Vec<MapWarning>), ParseError> {
    let value: Value =
        serde_json::from_str(raw).map_err(|e| ParseError::MalformedJson(e.to_string()))?;
    let wire: WireMap =
        serde_json::from_value(value).map_err(|e| ParseError::Schema(e.to_string()))?;
    CausalMap::from_wire(&wire).map_err(|e| match e {
        GraphError::InvalidPolarity { .. } | GraphError::EmptyName => {
            ParseError::Schema(e.to_string())
        }
        other => ParseError::Schema(other.to_string()),
    })
}
