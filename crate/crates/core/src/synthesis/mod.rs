//! Deterministic generation of the benchmark suites: 24 causal-translation
//! tests over a gibberish vocabulary and 18 conformance tests over two
//! real-world base prompts.

mod sentence;
mod suites;
mod vocabulary;

pub use sentence::{
    parse_sentence, render_sentence, split_description, CausalSentenceSpec, Direction,
    ParsedSentence,
};
pub use suites::{
    assemble_description, build_loop, build_multi_loop_tests, build_single_loop_tests,
    build_single_relationship_tests, canonical_suites, causal_suite, conformance_suite,
    suite_fixture_json, CAUSAL_SUITE_SIZE, CONFORMANCE_SUITE_SIZE,
};
pub use vocabulary::{pluralize, Vocabulary, VOCABULARY_SIZE};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CausalMap, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("vocabulary must contain exactly {} nouns, found {found}", VOCABULARY_SIZE)]
    VocabularySize { found: usize },
    #[error("vocabulary noun {noun:?} is not lowercase")]
    VocabularyCase { noun: String },
    #[error("vocabulary noun {noun:?} appears more than once")]
    VocabularyDuplicate { noun: String },
    #[error("noun {noun:?} cannot be pluralized by appending \"s\"")]
    UnpluralizableNoun { noun: String },
    #[error("noun is empty")]
    EmptyNoun,
    #[error("a causal sentence cannot relate {noun:?} to itself")]
    SelfReference { noun: String },
    #[error("a feedback loop needs at least 2 variables, got {length}")]
    InvalidLoopLength { length: usize },
    #[error("loop length {length} exceeds the vocabulary size {vocabulary}")]
    LoopTooLong { length: usize, vocabulary: usize },
    #[error("text does not match the causal sentence template: {sentence:?}")]
    UnparsableSentence { sentence: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which of the three causal-translation groups a test belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseGroup {
    SingleRelationship,
    SingleLoop,
    MultipleLoops,
}

impl CaseGroup {
    /// The wording used in failure-log entries.
    pub fn log_name(self) -> &'static str {
        match self {
            CaseGroup::SingleRelationship => "single relationship",
            CaseGroup::SingleLoop => "single feedback loop",
            CaseGroup::MultipleLoops => "multiple feedback loops",
        }
    }
}

impl fmt::Display for CaseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.log_name())
    }
}

/// A generated causal-translation test: the prose description handed to the
/// engine and the exact map it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthCase {
    pub id: String,
    pub group: CaseGroup,
    pub title: String,
    pub description: String,
    pub truth: CausalMap,
    pub seed: u64,
}

/// The two open-ended conformance scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConformanceCaseName {
    AmericanRevolution,
    RoadRage,
}

impl ConformanceCaseName {
    pub fn display(self) -> &'static str {
        match self {
            ConformanceCaseName::AmericanRevolution => "American Revolution",
            ConformanceCaseName::RoadRage => "Road Rage",
        }
    }

    pub fn base_prompt(self) -> &'static str {
        match self {
            ConformanceCaseName::AmericanRevolution => {
                "create a feedback-based explanation for the American revolutionary war"
            }
            ConformanceCaseName::RoadRage => "create a feedback-based explanation for road rage",
        }
    }

    pub fn required_variables(self) -> &'static [&'static str] {
        match self {
            ConformanceCaseName::AmericanRevolution => {
                &["Taxation", "Anti-British Sentiment", "Colonial Identity"]
            }
            ConformanceCaseName::RoadRage => &["Traffic Congestion", "Driver Stress", "Accidents"],
        }
    }
}

/// Required variables plus min/max bounds on variable and loop counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceConstraint {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub required_variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_variables: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_variables: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_loops: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_loops: Option<usize>,
}

impl ConformanceConstraint {
    pub fn is_vacuous(&self) -> bool {
        self.required_variables.is_empty()
            && self.min_variables.is_none()
            && self.max_variables.is_none()
            && self.min_loops.is_none()
            && self.max_loops.is_none()
    }

    /// Render the exact instruction sentence appended to a base prompt.
    /// Count clauses join with " and ", feedback-loop clause first.
    pub fn instruction(&self) -> String {
        let mut clauses: Vec<String> = Vec::new();
        if let Some(min) = self.min_loops {
            clauses.push(format!("at least {min} feedback loops"));
        }
        if let Some(max) = self.max_loops {
            clauses.push(format!("no more than {max} feedback loops"));
        }
        if let Some(min) = self.min_variables {
            clauses.push(format!("at least {min} variables"));
        }
        if let Some(max) = self.max_variables {
            clauses.push(format!("no more than {max} variables"));
        }
        if !self.required_variables.is_empty() {
            let quoted: Vec<String> = self
                .required_variables
                .iter()
                .map(|v| format!("\"{v}\""))
                .collect();
            let list = match quoted.len() {
                1 => quoted[0].clone(),
                n => format!("{} and {}", quoted[..n - 1].join(", "), quoted[n - 1]),
            };
            let sentence = format!("Your response must include the variables {list}");
            return if clauses.is_empty() {
                sentence
            } else {
                format!("{sentence} Your response must include {}.", clauses.join(" and "))
            };
        }
        format!("Your response must include {}.", clauses.join(" and "))
    }
}

/// One conformance test: a base prompt plus one rendered constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformanceCase {
    pub id: String,
    pub case_name: ConformanceCaseName,
    pub title: String,
    pub base_prompt: String,
    pub instruction: String,
    pub constraint: ConformanceConstraint,
}

impl ConformanceCase {
    /// The full prompt sent to an engine.
    pub fn prompt(&self) -> String {
        format!("{} {}", self.base_prompt, self.instruction)
    }
}
