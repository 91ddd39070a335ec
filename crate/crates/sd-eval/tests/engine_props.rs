//! Engine-level properties exercised against a loopback mock provider:
//! one request per generation, no worked examples in prompts, retry on
//! transient failures, record/replay transcripts, and parameter overrides
//! reaching the wire.

use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde_json::{json, Value};

use sd_eval::engines::{
    build_prompt, parse_structured_map, Engine, EngineError, GenerateRequest, LlmEngine,
    PromptTexts, ProviderClient, ProviderConfig, ProviderError, ProviderMode, Role,
};
use sd_eval::testing::MockProvider;
use sd_eval_core::graph::Polarity;
use sd_eval_core::synthesis::canonical_suites;

const MAP_JSON: &str = r#"{"variables":[{"name":"alpha"},{"name":"beta"}],"relationships":[{"from":"alpha","to":"beta","polarity":"+","reasoning":"test"}]}"#;

fn test_config(base_url: &str, key_env: &str) -> ProviderConfig {
    std::env::set_var(key_env, "test-key");
    ProviderConfig {
        base_url: base_url.to_string(),
        api_key_env: key_env.to_string(),
        timeout: Duration::from_secs(5),
        backoff_base: Duration::from_millis(10),
        ..ProviderConfig::default()
    }
}

fn request(prompt: &str) -> GenerateRequest {
    GenerateRequest {
        prompt: prompt.into(),
        ..GenerateRequest::default()
    }
}

#[tokio::test]
async fn exactly_one_provider_request_per_generation() {
    let mock = MockProvider::fixed(MAP_JSON.to_string()).await;
    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_ONEPASS");
    let provider = Arc::new(ProviderClient::new(config, ProviderMode::Live));
    let engine = LlmEngine::default_engine(provider);

    let response = engine.generate(&request("extract the map")).await.unwrap();
    assert_eq!(mock.calls(), 1, "one-pass means one request");
    assert_eq!(response.map.relationship_count(), 1);

    engine.generate(&request("another prompt")).await.unwrap();
    assert_eq!(mock.calls(), 2);
}

#[tokio::test]
async fn built_prompts_contain_no_worked_examples() {
    let (causal, conformance) = canonical_suites(0).unwrap();
    let texts = PromptTexts::default();
    for case in &causal {
        let req = GenerateRequest {
            prompt: "extract the relationships".into(),
            background_knowledge: Some(case.description.clone()),
            ..GenerateRequest::default()
        };
        let messages = build_prompt(&req, &texts);
        assert_eq!(messages.len(), 2, "system + user only");
        for message in &messages {
            assert_ne!(message.role, Role::Assistant);
            assert!(
                !message.content.contains("\"relationships\""),
                "prompt leaks an example model"
            );
        }
    }
    for case in &conformance {
        let messages = build_prompt(
            &GenerateRequest {
                prompt: case.prompt(),
                ..GenerateRequest::default()
            },
            &texts,
        );
        assert!(messages.iter().all(|m| m.role != Role::Assistant));
    }
}

#[tokio::test]
async fn retries_follow_429_then_succeed() {
    let mock = MockProvider::start(|call, _| {
        if call == 0 {
            (429, json!({"error": {"message": "slow down"}}))
        } else {
            (200, MockProvider::chat_body(MAP_JSON))
        }
    })
    .await;
    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_RETRY");
    let provider = ProviderClient::new(config, ProviderMode::Live);

    let reply = provider
        .complete(&sd_eval::engines::CompletionRequest {
            model: "gpt-4o".into(),
            messages: vec![sd_eval::engines::ChatMessage {
                role: Role::User,
                content: "hi".into(),
            }],
            reasoning_effort: None,
        })
        .await
        .unwrap();
    assert_eq!(mock.calls(), 2, "429 then success");
    assert_eq!(reply.content, MAP_JSON);
}

#[tokio::test]
async fn non_retryable_4xx_is_a_provider_error() {
    let mock = MockProvider::start(|_, _| (401, json!({"error": "bad key"}))).await;
    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_401");
    let provider = ProviderClient::new(config, ProviderMode::Live);
    let err = provider
        .complete(&sd_eval::engines::CompletionRequest {
            model: "gpt-4o".into(),
            messages: Vec::new(),
            reasoning_effort: None,
        })
        .await
        .unwrap_err();
    match err {
        ProviderError::Provider { status, .. } => assert_eq!(status, 401),
        other => panic!("unexpected error {other:?}"),
    }
    assert_eq!(mock.calls(), 1, "4xx must not be retried");
}

#[tokio::test]
async fn exhausted_retries_surface_as_transport_error() {
    let mock = MockProvider::start(|_, _| (503, json!({"error": "down"}))).await;
    let mut config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_503");
    config.max_retries = 2;
    let provider = ProviderClient::new(config, ProviderMode::Live);
    let err = provider
        .complete(&sd_eval::engines::CompletionRequest {
            model: "gpt-4o".into(),
            messages: Vec::new(),
            reasoning_effort: None,
        })
        .await
        .unwrap_err();
    assert!(matches!(err, ProviderError::Transport { attempts: 3, .. }));
    assert_eq!(mock.calls(), 3, "initial try plus two retries");
}

#[tokio::test]
async fn record_then_replay_is_byte_exact_and_offline() {
    let dir = tempfile::tempdir().unwrap();
    let mock = MockProvider::fixed(MAP_JSON.to_string()).await;

    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_RECORD");
    let recorder = ProviderClient::new(
        config.clone(),
        ProviderMode::Record(dir.path().to_path_buf()),
    );
    let completion = sd_eval::engines::CompletionRequest {
        model: "gpt-4o".into(),
        messages: vec![sd_eval::engines::ChatMessage {
            role: Role::User,
            content: "record me".into(),
        }],
        reasoning_effort: None,
    };
    let live = recorder.complete(&completion).await.unwrap();
    assert_eq!(mock.calls(), 1);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    // Replay needs no API key and no network.
    let replay_config = ProviderConfig {
        base_url: "http://192.0.2.1:1".to_string(),
        api_key_env: "SD_EVAL_TEST_KEY_THAT_IS_UNSET".to_string(),
        ..config
    };
    let replayer = ProviderClient::new(
        replay_config,
        ProviderMode::Replay(dir.path().to_path_buf()),
    );
    let replayed = replayer.complete(&completion).await.unwrap();
    assert_eq!(replayed.content, live.content);
    assert_eq!(mock.calls(), 1, "replay must not touch the network");
}

#[tokio::test]
async fn advanced_overrides_reach_the_wire() {
    let bodies: Arc<Mutex<Vec<Value>>> = Arc::new(Mutex::new(Vec::new()));
    let seen = bodies.clone();
    let mock = MockProvider::start(move |_, body| {
        seen.lock().unwrap().push(body.clone());
        (200, MockProvider::chat_body(MAP_JSON))
    })
    .await;
    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_OVERRIDE");
    let provider = Arc::new(ProviderClient::new(config, ProviderMode::Live));
    let engine = LlmEngine::advanced_engine(provider);

    let mut req = request("build");
    req.parameters
        .insert("model".into(), Value::from("o3-mini"));
    req.parameters
        .insert("reasoning_effort".into(), Value::from("high"));
    req.parameters
        .insert("system_prompt".into(), Value::from("X"));
    engine.generate(&req).await.unwrap();

    let body = bodies.lock().unwrap().pop().unwrap();
    assert_eq!(body["model"], "o3-mini");
    assert_eq!(body["reasoning_effort"], "high");
    let system = body["messages"][0]["content"].as_str().unwrap();
    assert!(system.starts_with("X\n\n"), "system prompt override applies");
    assert_eq!(
        body["response_format"]["type"], "json_schema",
        "structured outputs are always on"
    );
}

#[tokio::test]
async fn default_and_advanced_build_identical_prompts_by_default() {
    let bodies: Arc<Mutex<Vec<Value>>> = Arc::new(Mutex::new(Vec::new()));
    let seen = bodies.clone();
    let mock = MockProvider::start(move |_, body| {
        seen.lock().unwrap().push(body.clone());
        (200, MockProvider::chat_body(MAP_JSON))
    })
    .await;
    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_TWIN");
    let provider = Arc::new(ProviderClient::new(config, ProviderMode::Live));

    let mut req = request("the same prompt");
    req.background_knowledge = Some("the same background".into());
    LlmEngine::default_engine(provider.clone())
        .generate(&req)
        .await
        .unwrap();
    LlmEngine::advanced_engine(provider)
        .generate(&req)
        .await
        .unwrap();

    let bodies = bodies.lock().unwrap();
    assert_eq!(bodies[0]["messages"], bodies[1]["messages"]);
    assert_eq!(bodies[0]["model"], bodies[1]["model"]);
}

#[tokio::test]
async fn malformed_model_output_is_a_parse_error() {
    let mock = MockProvider::fixed("this is not json".to_string()).await;
    let config = test_config(&mock.base_url, "SD_EVAL_TEST_KEY_BADJSON");
    let provider = Arc::new(ProviderClient::new(config, ProviderMode::Live));
    let err = LlmEngine::default_engine(provider)
        .generate(&request("x"))
        .await
        .unwrap_err();
    assert!(matches!(err, EngineError::Parse(_)));
}

/// serialize(parse(x)) is a fixed point for valid wire documents.
#[test]
fn schema_round_trip_is_idempotent() {
    let (causal, _) = canonical_suites(0).unwrap();
    let mut docs: Vec<String> = causal
        .iter()
        .map(|c| serde_json::to_string(&c.truth.to_wire()).unwrap())
        .collect();
    docs.push(MAP_JSON.to_string());
    docs.push(
        r#"{"variables":[{"name":"  Mixed   Case "}],"relationships":[{"from":"  Mixed   Case ","to":"other","polarity":"-"}]}"#
            .to_string(),
    );
    for doc in docs {
        let (first, _) = parse_structured_map(&doc).unwrap();
        let once = serde_json::to_string(&first.to_wire()).unwrap();
        let (second, _) = parse_structured_map(&once).unwrap();
        let twice = serde_json::to_string(&second.to_wire()).unwrap();
        assert_eq!(once, twice);
        assert_eq!(first, second);
    }
}

#[test]
fn predprey_round_trips_through_the_wire_form() {
    let map = sd_eval::engines::PredPreyEngine::model();
    let doc = serde_json::to_string(&map.to_wire()).unwrap();
    let (parsed, warnings) = parse_structured_map(&doc).unwrap();
    assert!(warnings.is_empty());
    assert_eq!(parsed, map);
    assert_eq!(
        parsed.relationship("predators", "prey").unwrap().polarity,
        Polarity::Negative
    );
}
