//! Structured failure findings and their log-message renderings.
//!
//! Each finding carries enough data to reproduce its failure-log message
//! bit-exact, so recorded failures can be re-encoded and replayed without
//! the original model output.

use serde::{Deserialize, Serialize};

use crate::graph::Polarity;

/// One violation discovered while scoring a test. Relationship lists hold
/// display strings in `{from} --> ({polarity}) {to}` form, already sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    /// Candidate relationships absent from the ground truth.
    FakeRelationships {
        offenders: Vec<String>,
        truth: Vec<String>,
    },
    /// Ground-truth relationships absent from the candidate.
    MissingRelationships {
        missing: Vec<String>,
        truth: Vec<String>,
    },
    /// A matched pair with the wrong sign. `expected` is the truth's
    /// polarity, `actual` the candidate's.
    IncorrectPolarity {
        #[serde(default, skip_serializing_if = "String::is_empty")]
        from: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        to: String,
        expected: Polarity,
        actual: Polarity,
    },
    /// Instructed variables that never appeared.
    MissingRequiredVariables { missing: Vec<String> },
    TooFewVariables { variables: Vec<String>, min: usize },
    TooManyVariables { variables: Vec<String>, max: usize },
    TooFewLoops { count: usize, min: usize },
    TooManyLoops { count: usize, max: usize },
}

impl Finding {
    /// The failure-log message for this finding, bit-exact.
    pub fn message(&self) -> String {
        match self {
            Finding::FakeRelationships { offenders, truth } => format!(
                "Fake relationships found\n{}\nGround Truth\n{}: Expected {} to be 0.",
                offenders.join(", "),
                truth.join(", "),
                offenders.len()
            ),
            Finding::MissingRelationships { missing, truth } => format!(
                "Real relationships not found\n{}\nGround Truth\n{}: Expected {} to be 0.",
                missing.join(", "),
                truth.join(", "),
                missing.len()
            ),
            Finding::IncorrectPolarity {
                expected, actual, ..
            } => format!(
                "Incorrect polarity discovered: Expected '{actual}' to be '{expected}'."
            ),
            Finding::MissingRequiredVariables { missing } => format!(
                "Missing required variables: Variables are: {}: Expected {} to be 0.",
                missing.join(", "),
                missing.len()
            ),
            Finding::TooFewVariables { variables, min } => format!(
                "Too few variables: Variables are: {}: Expected {} to be greater than or equal {}.",
                variables.join(", "),
                variables.len(),
                min
            ),
            Finding::TooManyVariables { variables, max } => format!(
                "Too many variables: Variables are: {}: Expected {} to be less than or equal {}.",
                variables.join(", "),
                variables.len(),
                max
            ),
            Finding::TooFewLoops { count, min } => format!(
                "Too few feedback loops: The number of feedback loops found was {count}: \
                 Expected {count} to be greater than or equal {min}."
            ),
            Finding::TooManyLoops { count, max } => format!(
                "Too many feedback loops: The number of feedback loops found was {count}: \
                 Expected {count} to be less than or equal {max}."
            ),
        }
    }
}
