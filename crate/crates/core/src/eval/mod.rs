//! Scoring of engine outputs: causal translation against a ground truth,
//! conformance against a constraint, failure classification, and scorecard
//! arithmetic.

mod findings;

pub use findings::Finding;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{diff_maps, enumerate_loops, normalize_name, CausalMap, GraphError};
use crate::synthesis::{ConformanceCase, GroundTruthCase};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    /// Loop enumeration blew the cap; the test is errored, not failed.
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which test suite an outcome belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    CausalTranslation,
    Conformance,
}

impl Suite {
    /// The wording used in failure-log entries.
    pub fn log_name(self) -> &'static str {
        match self {
            Suite::CausalTranslation => "causal translation testing",
            Suite::Conformance => "conformance testing",
        }
    }
}

/// Why a causal-translation test failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalFailureKind {
    FakeRelationship,
    MissingRelationship,
    Polarity,
    Multiple,
}

impl CausalFailureKind {
    pub fn label(self) -> &'static str {
        match self {
            CausalFailureKind::FakeRelationship => "Fake relationship",
            CausalFailureKind::MissingRelationship => "Missing relationship",
            CausalFailureKind::Polarity => "Polarity",
            CausalFailureKind::Multiple => "Multiple Kinds of Failures",
        }
    }
}

/// Why a conformance test failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConformanceFailureKind {
    TooFewVariables,
    TooManyVariables,
    TooFewLoops,
    TooManyLoops,
    MissingRequiredVariable,
    Multiple,
}

impl ConformanceFailureKind {
    pub fn label(self) -> &'static str {
        match self {
            ConformanceFailureKind::TooFewVariables => "Too few variables",
            ConformanceFailureKind::TooManyVariables => "Too many variables",
            ConformanceFailureKind::TooFewLoops => "Too few feedback loops",
            ConformanceFailureKind::TooManyLoops => "Too many feedback loops",
            ConformanceFailureKind::MissingRequiredVariable => "Missing required variables",
            ConformanceFailureKind::Multiple => "Multiple Kinds of Failures",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCategory {
    Causal(CausalFailureKind),
    Conformance(ConformanceFailureKind),
}

impl FailureCategory {
    pub fn label(self) -> &'static str {
        match self {
            FailureCategory::Causal(kind) => kind.label(),
            FailureCategory::Conformance(kind) => kind.label(),
        }
    }
}

/// The result of scoring one test. pass <=> no findings <=> no category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub test_id: String,
    pub pass: bool,
    pub findings: Vec<Finding>,
    pub category: Option<FailureCategory>,
}

impl EvalOutcome {
    pub fn passing(test_id: impl Into<String>) -> Self {
        EvalOutcome {
            test_id: test_id.into(),
            pass: true,
            findings: Vec::new(),
            category: None,
        }
    }

    /// Build an outcome from causal findings (empty findings = pass).
    pub fn from_causal_findings(test_id: impl Into<String>, findings: Vec<Finding>) -> Self {
        if findings.is_empty() {
            return Self::passing(test_id);
        }
        let category = FailureCategory::Causal(classify_causal(&findings));
        EvalOutcome {
            test_id: test_id.into(),
            pass: false,
            findings,
            category: Some(category),
        }
    }

    /// Build an outcome from conformance findings (empty findings = pass).
    pub fn from_conformance_findings(test_id: impl Into<String>, findings: Vec<Finding>) -> Self {
        if findings.is_empty() {
            return Self::passing(test_id);
        }
        let category = FailureCategory::Conformance(classify_conformance(&findings));
        EvalOutcome {
            test_id: test_id.into(),
            pass: false,
            findings,
            category: Some(category),
        }
    }

    /// Rendered failure messages, one per finding.
    pub fn messages(&self) -> Vec<String> {
        self.findings.iter().map(Finding::message).collect()
    }
}

/// Score a candidate map against a ground-truth case. The candidate's fake
/// set is one finding, its missing set one finding, and each polarity
/// mismatch its own finding, mirroring the failure-log message shapes.
pub fn score_causal_translation(candidate: &CausalMap, case: &GroundTruthCase) -> EvalOutcome {
    let diff = diff_maps(candidate, &case.truth);
    let truth_list = case.truth.rendered_relationships();
    let mut findings = Vec::new();
    if !diff.fake.is_empty() {
        let mut offenders: Vec<String> = diff
            .fake
            .iter()
            .map(|rel| candidate.render_relationship(rel))
            .collect();
        offenders.sort();
        findings.push(Finding::FakeRelationships {
            offenders,
            truth: truth_list.clone(),
        });
    }
    if !diff.missing.is_empty() {
        let mut missing: Vec<String> = diff
            .missing
            .iter()
            .map(|rel| case.truth.render_relationship(rel))
            .collect();
        missing.sort();
        findings.push(Finding::MissingRelationships {
            missing,
            truth: truth_list.clone(),
        });
    }
    for mismatch in &diff.polarity_mismatches {
        findings.push(Finding::IncorrectPolarity {
            from: mismatch.from.clone(),
            to: mismatch.to.clone(),
            expected: mismatch.expected,
            actual: mismatch.actual,
        });
    }
    EvalOutcome::from_causal_findings(case.id.clone(), findings)
}

/// Classify a failing causal outcome into its Table-2 category.
///
/// Panics if called on a passing outcome (contract violation).
pub fn classify_causal(findings: &[Finding]) -> CausalFailureKind {
    assert!(!findings.is_empty(), "classification needs a failing outcome");
    let mut fake = false;
    let mut missing = false;
    let mut polarity = false;
    for finding in findings {
        match finding {
            Finding::FakeRelationships { .. } => fake = true,
            Finding::MissingRelationships { .. } => missing = true,
            Finding::IncorrectPolarity { .. } => polarity = true,
            other => panic!("not a causal finding: {other:?}"),
        }
    }
    match (fake, missing, polarity) {
        (true, false, false) => CausalFailureKind::FakeRelationship,
        (false, true, false) => CausalFailureKind::MissingRelationship,
        (false, false, true) => CausalFailureKind::Polarity,
        _ => CausalFailureKind::Multiple,
    }
}

/// Score a candidate map against a conformance constraint. Checks run in
/// order: required variables, variable count, feedback-loop count. Loop
/// enumeration blowing its cap is an error (test errored), not a failure.
pub fn score_conformance(
    candidate: &CausalMap,
    case: &ConformanceCase,
) -> Result<EvalOutcome, EvalError> {
    let constraint = &case.constraint;
    let mut findings = Vec::new();

    let missing_required: Vec<String> = constraint
        .required_variables
        .iter()
        .filter(|required| match normalize_name(required) {
            Ok(canonical) => !candidate.contains_variable(&canonical),
            Err(_) => true,
        })
        .cloned()
        .collect();
    if !missing_required.is_empty() {
        findings.push(Finding::MissingRequiredVariables {
            missing: missing_required,
        });
    }

    let variables: Vec<String> = candidate.display_names().map(str::to_string).collect();
    let variable_count = variables.len();
    if let Some(min) = constraint.min_variables {
        if variable_count < min {
            findings.push(Finding::TooFewVariables {
                variables: variables.clone(),
                min,
            });
        }
    }
    if let Some(max) = constraint.max_variables {
        if variable_count > max {
            findings.push(Finding::TooManyVariables {
                variables: variables.clone(),
                max,
            });
        }
    }

    if constraint.min_loops.is_some() || constraint.max_loops.is_some() {
        let loop_count = enumerate_loops(candidate)?.len();
        if let Some(min) = constraint.min_loops {
            if loop_count < min {
                findings.push(Finding::TooFewLoops {
                    count: loop_count,
                    min,
                });
            }
        }
        if let Some(max) = constraint.max_loops {
            if loop_count > max {
                findings.push(Finding::TooManyLoops {
                    count: loop_count,
                    max,
                });
            }
        }
    }

    Ok(EvalOutcome::from_conformance_findings(
        case.id.clone(),
        findings,
    ))
}

/// Classify a failing conformance outcome into its Table-3 category: a
/// variable-side and a loop-side violation together are "multiple".
///
/// Panics if called on a passing outcome (contract violation).
pub fn classify_conformance(findings: &[Finding]) -> ConformanceFailureKind {
    assert!(!findings.is_empty(), "classification needs a failing outcome");
    let mut kinds = Vec::new();
    let mut variable_side = false;
    let mut loop_side = false;
    for finding in findings {
        let kind = match finding {
            Finding::MissingRequiredVariables { .. } => {
                variable_side = true;
                ConformanceFailureKind::MissingRequiredVariable
            }
            Finding::TooFewVariables { .. } => {
                variable_side = true;
                ConformanceFailureKind::TooFewVariables
            }
            Finding::TooManyVariables { .. } => {
                variable_side = true;
                ConformanceFailureKind::TooManyVariables
            }
            Finding::TooFewLoops { .. } => {
                loop_side = true;
                ConformanceFailureKind::TooFewLoops
            }
            Finding::TooManyLoops { .. } => {
                loop_side = true;
                ConformanceFailureKind::TooManyLoops
            }
            other => panic!("not a conformance finding: {other:?}"),
        };
        kinds.push(kind);
    }
    if variable_side && loop_side {
        return ConformanceFailureKind::Multiple;
    }
    debug_assert!(
        kinds.windows(2).all(|w| w[0] == w[1]),
        "min/max of one quantity cannot both fail"
    );
    kinds[0]
}

/// Pass counts and 1-decimal percentages for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub causal_passed: usize,
    pub causal_total: usize,
    pub conformance_passed: usize,
    pub conformance_total: usize,
}

impl ScoreCard {
    pub fn causal_percent(&self) -> String {
        percent_1dp(self.causal_passed, self.causal_total)
    }

    pub fn conformance_percent(&self) -> String {
        percent_1dp(self.conformance_passed, self.conformance_total)
    }

    pub fn overall_percent(&self) -> String {
        percent_1dp(
            self.causal_passed + self.conformance_passed,
            self.causal_total + self.conformance_total,
        )
    }
}

/// Render passed/total as a percentage with one decimal, round half up.
/// Exact integer arithmetic, so 39/42 is "92.9" on every platform.
pub fn percent_1dp(passed: usize, total: usize) -> String {
    if total == 0 {
        return "0.0".to_string();
    }
    let tenths_times_total = passed * 1000;
    let mut tenths = tenths_times_total / total;
    if (tenths_times_total % total) * 2 >= total {
        tenths += 1;
    }
    format!("{}.{}", tenths / 10, tenths % 10)
}

/// Fold suite-tagged outcomes into a scorecard.
pub fn aggregate<'a, I>(outcomes: I) -> ScoreCard
where
    I: IntoIterator<Item = (Suite, &'a EvalOutcome)>,
{
    let mut card = ScoreCard::default();
    for (suite, outcome) in outcomes {
        match suite {
            Suite::CausalTranslation => {
                card.causal_total += 1;
                if outcome.pass {
                    card.causal_passed += 1;
                }
            }
            Suite::Conformance => {
                card.conformance_total += 1;
                if outcome.pass {
                    card.conformance_passed += 1;
                }
            }
        }
    }
    card
}
