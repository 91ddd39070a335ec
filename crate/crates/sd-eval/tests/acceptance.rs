//! Acceptance gate: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them alongside the
//! harness output). Every tolerance is pinned here in code.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sd_eval::engines::{
    build_prompt, EngineRegistry, GenerateRequest, PromptTexts, ProviderClient, ProviderConfig,
    ProviderMode, Role,
};
use sd_eval::harness::report::{causal_failure_counts, render_report, ReportFormat};
use sd_eval::harness::{run_suite, RunConfig, RunHeader, RunReport, TestRecord};
use sd_eval::service::{router, ServiceState};
use sd_eval::testing::MockProvider;
use sd_eval_core::eval::{aggregate, score_causal_translation, EvalOutcome, Finding, Suite};
use sd_eval_core::fixtures::{builtin_fixtures, verify_fixtures};
use sd_eval_core::graph::{enumerate_loops, Polarity};
use sd_eval_core::synthesis::{canonical_suites, CaseGroup, ConformanceCaseName};
use sd_eval_core::testing::{brute_force_loops, mutate, random_digraph, Mutation};
use sd_eval_core::{CausalFailureKind, FailureCategory};

fn pass(name: &str, started: Instant) {
    println!("acceptance: {name} ... PASS ({:?})", started.elapsed());
}

fn within(started: Instant, budget: Duration, name: &str) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{name} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

/// canonical_suites(0) emits exactly 24 causal tests partitioned 4/14/6
/// and 18 conformance tests partitioned 2x9 with the reference bounds.
#[test]
fn acceptance_01_suite_shape() {
    let started = Instant::now();
    let (causal, conformance) = canonical_suites(0).unwrap();

    assert_eq!(causal.len(), 24);
    let count = |g: CaseGroup| causal.iter().filter(|c| c.group == g).count();
    assert_eq!(count(CaseGroup::SingleRelationship), 4);
    assert_eq!(count(CaseGroup::SingleLoop), 14);
    assert_eq!(count(CaseGroup::MultipleLoops), 6);

    assert_eq!(conformance.len(), 18);
    for case_name in [
        ConformanceCaseName::AmericanRevolution,
        ConformanceCaseName::RoadRage,
    ] {
        let cases: Vec<_> = conformance
            .iter()
            .filter(|c| c.case_name == case_name)
            .collect();
        assert_eq!(cases.len(), 9);
        type Bounds = (Option<usize>, Option<usize>, Option<usize>, Option<usize>);
        let bounds: Vec<Bounds> = cases
            .iter()
            .map(|c| {
                (
                    c.constraint.min_variables,
                    c.constraint.max_variables,
                    c.constraint.min_loops,
                    c.constraint.max_loops,
                )
            })
            .collect();
        assert_eq!(
            bounds,
            [
                (None, None, None, None),            // required variables only
                (Some(10), None, None, None),        // at least 10 variables
                (None, Some(5), None, None),         // no more than 5 variables
                (None, None, Some(8), None),         // at least 8 loops
                (None, None, None, Some(4)),         // no more than 4 loops
                (Some(8), None, Some(6), None),      // >=6 loops and >=8 variables
                (None, Some(15), Some(6), None),     // >=6 loops and <=15 variables
                (None, Some(5), None, Some(4)),      // <=4 loops and <=5 variables
                (Some(5), None, None, Some(4)),      // <=4 loops and >=5 variables
            ]
        );
        assert_eq!(
            cases[0].constraint.required_variables,
            case_name
                .required_variables()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
        );
    }
    within(started, Duration::from_secs(1), "suite shape");
    pass("suite shape (24 = 4+14+6, 18 = 2x9, reference bounds)", started);
}

/// Every canonical ground truth scored against itself passes with zero
/// findings.
#[test]
fn acceptance_02_self_evaluation_oracle() {
    let started = Instant::now();
    let (causal, _) = canonical_suites(0).unwrap();
    let mut passed = 0;
    for case in &causal {
        let outcome = score_causal_translation(&case.truth, case);
        assert!(outcome.pass && outcome.findings.is_empty(), "{}", case.title);
        passed += 1;
    }
    assert_eq!(passed, 24);
    within(started, Duration::from_secs(1), "self evaluation");
    pass("self-evaluation oracle (24/24, zero findings)", started);
}

/// Random single mutations map to exactly their failure kind; combined
/// mutations of different kinds map to "multiple". 100% over >=500 trials.
#[test]
fn acceptance_03_mutation_suite() {
    let started = Instant::now();
    let (causal, _) = canonical_suites(0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let mut singles = 0;
    while singles < 400 {
        let case = causal.choose(&mut rng).unwrap();
        let mutation = *Mutation::ALL.choose(&mut rng).unwrap();
        let Some(candidate) = mutate(&case.truth, mutation, &mut rng) else {
            continue;
        };
        let outcome = score_causal_translation(&candidate, case);
        assert_eq!(
            outcome.category,
            Some(FailureCategory::Causal(mutation.expected_kind())),
            "{}: {mutation:?}",
            case.title
        );
        singles += 1;
    }

    let mut pairs = 0;
    while pairs < 150 {
        let case = causal.choose(&mut rng).unwrap();
        if case.truth.relationship_count() < 2 {
            continue;
        }
        // Delete one relationship, flip another, or add on top of either:
        // any two distinct kinds must land in "multiple".
        let first = *Mutation::ALL.choose(&mut rng).unwrap();
        let others: Vec<Mutation> = Mutation::ALL.into_iter().filter(|k| *k != first).collect();
        let second = *others.choose(&mut rng).unwrap();
        let Some(intermediate) = mutate(&case.truth, first, &mut rng) else {
            continue;
        };
        let Some(candidate) = mutate(&intermediate, second, &mut rng) else {
            continue;
        };
        let outcome = score_causal_translation(&candidate, case);
        let has = |m: Mutation| {
            outcome.findings.iter().any(|f| match m {
                Mutation::DeleteRelationship => matches!(f, Finding::MissingRelationships { .. }),
                Mutation::FlipPolarity => matches!(f, Finding::IncorrectPolarity { .. }),
                Mutation::AddRelationship => matches!(f, Finding::FakeRelationships { .. }),
            })
        };
        if !(has(first) && has(second)) {
            // The second mutation cancelled or shadowed the first; not a
            // two-kind candidate. Try another draw.
            continue;
        }
        assert_eq!(
            outcome.category,
            Some(FailureCategory::Causal(CausalFailureKind::Multiple)),
            "{}: {first:?}+{second:?}",
            case.title
        );
        pairs += 1;
    }

    assert!(singles + pairs >= 500);
    within(started, Duration::from_secs(10), "mutation suite");
    pass("mutation suite (550 trials, 100% expected kinds)", started);
}

/// enumerate_loops equals the exhaustive oracle on 200 random digraphs of
/// at most 7 nodes.
#[test]
fn acceptance_04_cycle_enumeration_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5D_EA17);
    for instance in 0..200 {
        let map = random_digraph(&mut rng, false);
        let fast: Vec<_> = enumerate_loops(&map)
            .unwrap()
            .iter()
            .map(|l| (l.nodes().to_vec(), l.polarity()))
            .collect();
        let slow: Vec<_> = brute_force_loops(&map)
            .iter()
            .map(|l| (l.nodes().to_vec(), l.polarity()))
            .collect();
        assert_eq!(fast, slow, "instance {instance}");
    }
    within(started, Duration::from_secs(30), "cycle enumeration");
    pass("cycle-enumeration equivalence (200 digraphs, exact)", started);
}

/// The encoded failure fixtures replay bit-exact: category and
/// every message string.
#[test]
fn acceptance_05_fixture_replay() {
    let started = Instant::now();
    let fixtures = builtin_fixtures();
    assert!(fixtures.len() >= 12, "need at least 12 fixtures");
    for required in [4, 9, 13, 63, 85, 87, 102, 109, 113, 124, 133] {
        assert!(fixtures.iter().any(|f| f.id == required), "fixture {required}");
    }
    assert!(
        fixtures
            .iter()
            .any(|f| (31..=44).contains(&f.id) && f.expected_category == "polarity"),
        "need a polarity-only fixture from items 31-44"
    );
    let report = verify_fixtures(&fixtures);
    assert!(
        report.all_passed(),
        "fixture divergences: {:#?}",
        report.divergences
    );
    pass(
        &format!("fixture replay ({}/{} bit-exact)", report.passed, report.total),
        started,
    );
}

/// Aggregate reproduces the reference scorecard rows from pass/fail
/// vectors, and the category table counts 14 polarity-only failures as 14
/// under Polarity.
#[test]
fn acceptance_06_table_arithmetic() {
    let started = Instant::now();

    // 24/24 causal, 15/18 conformance.
    let outcomes_a: Vec<(Suite, EvalOutcome)> = (0..24)
        .map(|i| (Suite::CausalTranslation, EvalOutcome::passing(format!("ct{i}"))))
        .chain((0..18).map(|i| {
            let outcome = if i < 15 {
                EvalOutcome::passing(format!("cf{i}"))
            } else {
                EvalOutcome::from_conformance_findings(
                    format!("cf{i}"),
                    vec![Finding::TooFewLoops { count: 3, min: 8 }],
                )
            };
            (Suite::Conformance, outcome)
        }))
        .collect();
    let card = aggregate(outcomes_a.iter().map(|(s, o)| (*s, o)));
    assert_eq!(
        (card.causal_percent(), card.conformance_percent(), card.overall_percent()),
        ("100.0".to_string(), "83.3".to_string(), "92.9".to_string())
    );

    // 10/24 causal (14 polarity-only failures), 14/18 conformance.
    let polarity_failure = |id: String| {
        EvalOutcome::from_causal_findings(
            id,
            vec![Finding::IncorrectPolarity {
                from: "a".into(),
                to: "b".into(),
                expected: Polarity::Positive,
                actual: Polarity::Negative,
            }],
        )
    };
    let causal_records: Vec<TestRecord> = (0..24)
        .map(|i| {
            let id = format!("ct{i:02}");
            TestRecord {
                id: id.clone(),
                suite: Suite::CausalTranslation,
                group: Some("single feedback loop".into()),
                title: format!("case {i}"),
                outcome: if i < 14 {
                    polarity_failure(id)
                } else {
                    EvalOutcome::passing(id)
                },
            }
        })
        .collect();
    let outcomes_b: Vec<(Suite, EvalOutcome)> = causal_records
        .iter()
        .map(|r| (Suite::CausalTranslation, r.outcome.clone()))
        .chain((0..18).map(|i| {
            let outcome = if i < 14 {
                EvalOutcome::passing(format!("cf{i}"))
            } else {
                EvalOutcome::from_conformance_findings(
                    format!("cf{i}"),
                    vec![Finding::TooFewLoops { count: 3, min: 8 }],
                )
            };
            (Suite::Conformance, outcome)
        }))
        .collect();
    let card = aggregate(outcomes_b.iter().map(|(s, o)| (*s, o)));
    assert_eq!(
        (card.causal_percent(), card.conformance_percent(), card.overall_percent()),
        ("41.7".to_string(), "77.8".to_string(), "57.1".to_string())
    );

    let report = RunReport {
        header: RunHeader::default(),
        engine: "default".into(),
        model: "gpt-4o".into(),
        seed: 0,
        suites: vec![Suite::CausalTranslation],
        scorecard: card,
        results: causal_records,
        errored: Vec::new(),
    };
    let counts = causal_failure_counts(&report);
    assert_eq!(counts.polarity, 14);
    assert_eq!(counts.fake_relationship, 0);
    assert_eq!(counts.missing_relationship, 0);
    assert_eq!(counts.multiple, 0);
    assert_eq!(counts.total(), 14);
    let markdown = render_report(&report, ReportFormat::Markdown);
    assert!(markdown.contains("| gpt-4o | 0 | 0 | 0 | 14 | 14 |"));
    assert!(markdown.contains("| gpt-4o | 41.7% | 77.8% | 57.1% |"));

    pass("table arithmetic (100.0/83.3/92.9, 41.7/77.8/57.1, 14 polarity)", started);
}

/// Two runs with the same seed and replay transcripts produce byte-
/// identical reports once the timestamp header is set aside.
#[tokio::test]
async fn acceptance_07_replay_determinism() {
    let started = Instant::now();
    let map_json = r#"{"variables":[{"name":"alpha"},{"name":"beta"}],"relationships":[{"from":"alpha","to":"beta","polarity":"+","reasoning":"r"},{"from":"beta","to":"alpha","polarity":"-","reasoning":"r"}]}"#;
    let mock = MockProvider::fixed(map_json.to_string()).await;
    std::env::set_var("SD_EVAL_ACCEPT_KEY", "test-key");
    let dir = tempfile::tempdir().unwrap();

    let base = ProviderConfig {
        base_url: mock.base_url.clone(),
        api_key_env: "SD_EVAL_ACCEPT_KEY".to_string(),
        timeout: Duration::from_secs(5),
        backoff_base: Duration::from_millis(10),
        ..ProviderConfig::default()
    };
    let mut cfg = RunConfig::new("default", "mock-model");
    cfg.seed = 0;

    let recorder = Arc::new(ProviderClient::new(
        base.clone(),
        ProviderMode::Record(dir.path().to_path_buf()),
    ));
    run_suite(&EngineRegistry::builtin(recorder), &cfg).await.unwrap();

    let mut rendered = Vec::new();
    for _ in 0..2 {
        let replayer = Arc::new(ProviderClient::new(
            base.clone(),
            ProviderMode::Replay(dir.path().to_path_buf()),
        ));
        let mut report = run_suite(&EngineRegistry::builtin(replayer), &cfg)
            .await
            .unwrap();
        assert!(report.errored.is_empty());
        report.header = RunHeader::default();
        rendered.push((
            render_report(&report, ReportFormat::Json),
            render_report(&report, ReportFormat::Markdown),
            render_report(&report, ReportFormat::Csv),
        ));
    }
    assert_eq!(rendered[0], rendered[1], "replayed reports must be byte-identical");
    pass("replay determinism (json+markdown+csv byte-identical)", started);
}

/// predprey over the REST surface returns the fixed 2-variable model and
/// every enumerated error case returns its mapped status code.
#[tokio::test]
async fn acceptance_08_service_conformance() {
    let started = Instant::now();
    std::env::set_var("SD_EVAL_ACCEPT_SVC_KEY", "test-key");
    let config = ProviderConfig {
        base_url: "http://127.0.0.1:9".to_string(), // refuses connections
        api_key_env: "SD_EVAL_ACCEPT_SVC_KEY".to_string(),
        timeout: Duration::from_secs(2),
        backoff_base: Duration::from_millis(10),
        max_retries: 0,
        ..ProviderConfig::default()
    };
    let provider = Arc::new(ProviderClient::new(config, ProviderMode::Live));
    let registry = Arc::new(EngineRegistry::builtin(provider));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move {
        axum::serve(
            listener,
            router(ServiceState::new(registry, Duration::from_secs(2))),
        )
        .await
        .ok();
    });
    let base = format!("http://{addr}");
    let client = reqwest::Client::new();

    let body: Value = client
        .post(format!("{base}/api/v1/engines/predprey/generate"))
        .json(&json!({"prompt": "anything"}))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(body["model"]["variables"], json!([{"name": "predators"}, {"name": "prey"}]));
    assert_eq!(
        body["model"]["relationships"],
        json!([
            {"from": "predators", "to": "prey", "polarity": "-"},
            {"from": "prey", "to": "predators", "polarity": "+"}
        ])
    );

    let missing_prompt = client
        .post(format!("{base}/api/v1/engines/predprey/generate"))
        .json(&json!({}))
        .send()
        .await
        .unwrap();
    assert_eq!(missing_prompt.status(), 400);

    let unknown_engine = client
        .post(format!("{base}/api/v1/engines/ghost/generate"))
        .json(&json!({"prompt": "x"}))
        .send()
        .await
        .unwrap();
    assert_eq!(unknown_engine.status(), 404);

    let provider_down = client
        .post(format!("{base}/api/v1/engines/default/generate"))
        .json(&json!({"prompt": "x"}))
        .send()
        .await
        .unwrap();
    assert_eq!(provider_down.status(), 502);
    let document: Value = provider_down.json().await.unwrap();
    assert_eq!(document["code"], "provider_error");

    within(started, Duration::from_secs(5), "service conformance");
    pass("service conformance (fixed model, 400/404/502 mapping)", started);
}

/// Exactly one provider request per generation; no built prompt contains
/// an example model.
#[tokio::test]
async fn acceptance_09_one_pass_zero_shot() {
    let started = Instant::now();
    let map_json = r#"{"variables":[{"name":"a"},{"name":"b"}],"relationships":[{"from":"a","to":"b","polarity":"+","reasoning":"r"}]}"#;
    let mock = MockProvider::fixed(map_json.to_string()).await;
    std::env::set_var("SD_EVAL_ACCEPT_OP_KEY", "test-key");
    let config = ProviderConfig {
        base_url: mock.base_url.clone(),
        api_key_env: "SD_EVAL_ACCEPT_OP_KEY".to_string(),
        timeout: Duration::from_secs(5),
        backoff_base: Duration::from_millis(10),
        ..ProviderConfig::default()
    };
    let provider = Arc::new(ProviderClient::new(config, ProviderMode::Live));
    let registry = EngineRegistry::builtin(provider);

    let report = run_suite(&registry, &RunConfig::new("default", "mock-model"))
        .await
        .unwrap();
    assert!(report.errored.is_empty());
    assert_eq!(
        mock.calls(),
        42,
        "42 tests, one provider request each, no second polarity pass"
    );

    // Zero-shot: the built prompt for every test carries no example model.
    let (causal, conformance) = canonical_suites(0).unwrap();
    let texts = PromptTexts::default();
    let mut prompts: Vec<GenerateRequest> = causal
        .iter()
        .map(|case| GenerateRequest {
            prompt: "extract".into(),
            background_knowledge: Some(case.description.clone()),
            ..GenerateRequest::default()
        })
        .collect();
    prompts.extend(conformance.iter().map(|case| GenerateRequest {
        prompt: case.prompt(),
        ..GenerateRequest::default()
    }));
    for request in &prompts {
        for message in build_prompt(request, &texts) {
            assert_ne!(message.role, Role::Assistant, "no example dialogue");
            assert!(
                !message.content.contains("\"relationships\""),
                "no example model in prompts"
            );
        }
    }
    pass("one-pass/zero-shot (42 calls for 42 tests, clean prompts)", started);
}
