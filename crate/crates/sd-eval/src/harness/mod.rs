//! The suite runner: builds generation requests from the canonical suites,
//! drives an engine with bounded concurrency, scores and classifies every
//! output, and aggregates a report.

pub mod report;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use futures::stream::{FuturesUnordered, StreamExt};
use serde::Serialize;
use thiserror::Error;

use sd_eval_core::eval::{
    aggregate, score_causal_translation, score_conformance, EvalOutcome, ScoreCard, Suite,
};
use sd_eval_core::synthesis::{
    causal_suite, conformance_suite, ConformanceCase, GroundTruthCase, SynthesisError, Vocabulary,
};

use crate::engines::{Engine, EngineError, EngineRegistry, GenerateRequest};

/// The task prompt paired with every causal-translation test. The ground
/// truth rides in as background knowledge; this asks the engine to pull
/// the relationships back out.
pub const DEFAULT_CAUSAL_TASK_PROMPT: &str = "Extract every causal relationship described in \
the background information you have been given, using exactly the variable names it uses.";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no suites selected")]
    NoSuites,
    #[error("vocabulary file {path}: {detail}")]
    Vocabulary { path: String, detail: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub engine: String,
    /// Row label in report tables; normally the model identifier.
    pub model_label: String,
    pub seed: u64,
    pub concurrency: usize,
    pub causal_task_prompt: String,
    /// Replacement noun list (one per line) for suite generation.
    pub vocabulary_file: Option<std::path::PathBuf>,
}

impl RunConfig {
    pub fn new(engine: &str, model_label: &str) -> Self {
        RunConfig {
            suites: vec![Suite::CausalTranslation, Suite::Conformance],
            engine: engine.to_string(),
            model_label: model_label.to_string(),
            seed: 0,
            concurrency: 4,
            causal_task_prompt: DEFAULT_CAUSAL_TASK_PROMPT.to_string(),
            vocabulary_file: None,
        }
    }

    fn vocabulary(&self) -> Result<Vocabulary, HarnessError> {
        match &self.vocabulary_file {
            None => Ok(Vocabulary::builtin()),
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| HarnessError::Vocabulary {
                        path: path.display().to_string(),
                        detail: e.to_string(),
                    })?;
                Ok(Vocabulary::from_lines(&text)?)
            }
        }
    }
}

/// Everything nondeterministic in a report lives here, so two replayed
/// runs are byte-identical once this one header is set aside.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunHeader {
    pub generated_at: String,
    pub wall_clock_ms: u128,
    pub test_latency_ms: BTreeMap<String, u128>,
}

/// One scored test.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TestRecord {
    pub id: String,
    pub suite: Suite,
    /// Causal group name for log entries; conformance entries fold the
    /// instruction into the title instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub title: String,
    pub outcome: EvalOutcome,
}

/// A test the engine could not complete (transport, parse, enumeration
/// blow-up). Errored tests never count in pass percentages.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErroredTest {
    pub id: String,
    pub suite: Suite,
    pub title: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub header: RunHeader,
    pub engine: String,
    pub model: String,
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub scorecard: ScoreCard,
    pub results: Vec<TestRecord>,
    pub errored: Vec<ErroredTest>,
}

impl RunReport {
    pub fn results_for(&self, suite: Suite) -> impl Iterator<Item = &TestRecord> {
        self.results.iter().filter(move |r| r.suite == suite)
    }

    pub fn errored_count(&self) -> usize {
        self.errored.len()
    }
}

enum TestCase {
    Causal(GroundTruthCase),
    Conformance(ConformanceCase),
}

impl TestCase {
    fn id(&self) -> &str {
        match self {
            TestCase::Causal(c) => &c.id,
            TestCase::Conformance(c) => &c.id,
        }
    }

    fn suite(&self) -> Suite {
        match self {
            TestCase::Causal(_) => Suite::CausalTranslation,
            TestCase::Conformance(_) => Suite::Conformance,
        }
    }

    fn title(&self) -> &str {
        match self {
            TestCase::Causal(c) => &c.title,
            TestCase::Conformance(c) => &c.title,
        }
    }

    fn group(&self) -> Option<String> {
        match self {
            TestCase::Causal(c) => Some(c.group.log_name().to_string()),
            TestCase::Conformance(_) => None,
        }
    }

    fn request(&self, causal_task_prompt: &str) -> GenerateRequest {
        match self {
            TestCase::Causal(case) => GenerateRequest {
                prompt: causal_task_prompt.to_string(),
                background_knowledge: Some(case.description.clone()),
                ..GenerateRequest::default()
            },
            TestCase::Conformance(case) => GenerateRequest {
                prompt: case.prompt(),
                ..GenerateRequest::default()
            },
        }
    }
}

/// Run the selected suites against one engine. Per-test engine errors are
/// recorded and the run continues; ordering is fixed by test id, so the
/// report is identical for any concurrency level.
pub async fn run_suite(
    registry: &EngineRegistry,
    config: &RunConfig,
) -> Result<RunReport, HarnessError> {
    if config.suites.is_empty() {
        return Err(HarnessError::NoSuites);
    }
    let engine = registry.get(&config.engine)?;
    let vocabulary = config.vocabulary()?;

    let mut cases: Vec<TestCase> = Vec::new();
    if config.suites.contains(&Suite::CausalTranslation) {
        let causal = causal_suite(&vocabulary, config.seed)?;
        cases.extend(causal.into_iter().map(TestCase::Causal));
    }
    if config.suites.contains(&Suite::Conformance) {
        cases.extend(conformance_suite().into_iter().map(TestCase::Conformance));
    }

    let started = Instant::now();
    let generated_at = chrono::Utc::now().to_rfc3339();
    let concurrency = config.concurrency.max(1);

    let mut pending = FuturesUnordered::new();
    let mut executions: Vec<Option<(u128, Result<crate::engines::GenerateResponse, EngineError>)>> =
        cases.iter().map(|_| None).collect();
    let mut next = 0usize;
    while next < cases.len() || !pending.is_empty() {
        while next < cases.len() && pending.len() < concurrency {
            let request = cases[next].request(&config.causal_task_prompt);
            let engine: Arc<dyn Engine> = engine.clone();
            let index = next;
            pending.push(async move {
                let attempt_started = Instant::now();
                let result = engine.generate(&request).await;
                (index, attempt_started.elapsed().as_millis(), result)
            });
            next += 1;
        }
        if let Some((index, latency, result)) = pending.next().await {
            executions[index] = Some((latency, result));
        }
    }

    let mut results = Vec::new();
    let mut errored = Vec::new();
    let mut latencies = BTreeMap::new();
    for (case, execution) in cases.iter().zip(executions) {
        let (latency, generation) = execution.expect("every test executed");
        latencies.insert(case.id().to_string(), latency);
        match generation {
            Err(e) => errored.push(ErroredTest {
                id: case.id().to_string(),
                suite: case.suite(),
                title: case.title().to_string(),
                error: e.to_string(),
            }),
            Ok(response) => {
                let scored: Result<EvalOutcome, String> = match case {
                    TestCase::Causal(c) => Ok(score_causal_translation(&response.map, c)),
                    TestCase::Conformance(c) => {
                        score_conformance(&response.map, c).map_err(|e| e.to_string())
                    }
                };
                match scored {
                    Ok(outcome) => results.push(TestRecord {
                        id: case.id().to_string(),
                        suite: case.suite(),
                        group: case.group(),
                        title: case.title().to_string(),
                        outcome,
                    }),
                    Err(error) => errored.push(ErroredTest {
                        id: case.id().to_string(),
                        suite: case.suite(),
                        title: case.title().to_string(),
                        error,
                    }),
                }
            }
        }
    }

    let scorecard = aggregate(results.iter().map(|r| (r.suite, &r.outcome)));
    Ok(RunReport {
        header: RunHeader {
            generated_at,
            wall_clock_ms: started.elapsed().as_millis(),
            test_latency_ms: latencies,
        },
        engine: config.engine.clone(),
        model: config.model_label.clone(),
        seed: config.seed,
        suites: config.suites.clone(),
        scorecard,
        results,
        errored,
    })
}
