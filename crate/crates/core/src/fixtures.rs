//! Recorded failure fixtures and their replay.
//!
//! Each fixture encodes one recorded failure-log entry: the findings as
//! structured data plus the recorded category and message strings. Replay
//! re-classifies the findings and re-renders their messages, so any drift
//! in scoring or message formats shows up as a divergence.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{classify_causal, classify_conformance, Finding, Suite};

const BUILTIN_FIXTURES: &str = include_str!("../data/appendix_fixtures.json");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture file {path} is missing or unreadable: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("fixture file does not parse: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// One encoded failure-log entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixFixture {
    pub id: u32,
    pub model: String,
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub title: String,
    pub findings: Vec<Finding>,
    pub expected_category: String,
    pub expected_messages: Vec<String>,
}

/// The fixture set shipped with the crate.
pub fn builtin_fixtures() -> Vec<AppendixFixture> {
    serde_json::from_str(BUILTIN_FIXTURES).expect("shipped fixture file is valid")
}

pub fn load_fixtures(path: &Path) -> Result<Vec<AppendixFixture>, FixtureError> {
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Unreadable {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Result of replaying a fixture set.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FixtureReport {
    pub total: usize,
    pub passed: usize,
    pub divergences: Vec<FixtureDivergence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureDivergence {
    pub fixture_id: u32,
    pub detail: String,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

/// Replay one fixture: classification and every rendered message must match
/// the record.
pub fn verify_fixture(fixture: &AppendixFixture) -> Vec<FixtureDivergence> {
    let mut divergences = Vec::new();
    let mut diverge = |detail: String| {
        divergences.push(FixtureDivergence {
            fixture_id: fixture.id,
            detail,
        })
    };

    let category = match fixture.suite {
        Suite::CausalTranslation => {
            serde_json::to_value(classify_causal(&fixture.findings)).expect("serializable")
        }
        Suite::Conformance => {
            serde_json::to_value(classify_conformance(&fixture.findings)).expect("serializable")
        }
    };
    let category = category.as_str().unwrap_or_default().to_string();
    if category != fixture.expected_category {
        diverge(format!(
            "category: got {category:?}, recorded {:?}",
            fixture.expected_category
        ));
    }

    let messages: Vec<String> = fixture.findings.iter().map(Finding::message).collect();
    if messages.len() != fixture.expected_messages.len() {
        diverge(format!(
            "message count: got {}, recorded {}",
            messages.len(),
            fixture.expected_messages.len()
        ));
    }
    for (i, (got, want)) in messages
        .iter()
        .zip(fixture.expected_messages.iter())
        .enumerate()
    {
        if got != want {
            diverge(format!("message {i}: got {got:?}, recorded {want:?}"));
        }
    }
    divergences
}

/// Replay a fixture set and summarize.
pub fn verify_fixtures(fixtures: &[AppendixFixture]) -> FixtureReport {
    let mut report = FixtureReport {
        total: fixtures.len(),
        ..FixtureReport::default()
    };
    for fixture in fixtures {
        let divergences = verify_fixture(fixture);
        if divergences.is_empty() {
            report.passed += 1;
        } else {
            report.divergences.extend(divergences);
        }
    }
    report
}
