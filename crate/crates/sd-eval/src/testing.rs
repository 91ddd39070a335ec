//! Test support: an in-process OpenAI-compatible mock provider and an
//! oracle engine that answers every causal test with its own ground truth.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};

use sd_eval_core::graph::CausalMap;
use sd_eval_core::synthesis::GroundTruthCase;

use crate::engines::{
    Engine, EngineError, GenerateRequest, GenerateResponse, ParameterSpec, PredPreyEngine,
};

type Responder = dyn Fn(usize, &Value) -> (u16, Value) + Send + Sync;

#[derive(Clone)]
struct MockState {
    calls: Arc<AtomicUsize>,
    respond: Arc<Responder>,
}

/// A loopback `POST /chat/completions` endpoint driven by a closure, with
/// a call counter.
pub struct MockProvider {
    pub base_url: String,
    calls: Arc<AtomicUsize>,
}

impl MockProvider {
    pub async fn start<F>(respond: F) -> Self
    where
        F: Fn(usize, &Value) -> (u16, Value) + Send + Sync + 'static,
    {
        let calls = Arc::new(AtomicUsize::new(0));
        let state = MockState {
            calls: calls.clone(),
            respond: Arc::new(respond),
        };
        let app = Router::new()
            .route("/chat/completions", post(handle))
            .with_state(state);
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
            .await
            .expect("bind loopback");
        let addr = listener.local_addr().expect("local addr");
        tokio::spawn(async move {
            axum::serve(listener, app).await.ok();
        });
        MockProvider {
            base_url: format!("http://{addr}"),
            calls,
        }
    }

    /// A provider that always answers 200 with `content` as the assistant
    /// message.
    pub async fn fixed(content: String) -> Self {
        Self::start(move |_, _| (200, Self::chat_body(&content))).await
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    /// A minimal chat-completion response body.
    pub fn chat_body(content: &str) -> Value {
        json!({
            "choices": [{ "message": { "role": "assistant", "content": content } }],
            "usage": { "prompt_tokens": 1, "completion_tokens": 1 }
        })
    }
}

async fn handle(State(state): State<MockState>, Json(body): Json<Value>) -> impl IntoResponse {
    let call = state.calls.fetch_add(1, Ordering::SeqCst);
    let (status, reply) = (state.respond)(call, &body);
    (
        StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
        Json(reply),
    )
}

/// Looks up the ground truth whose description arrived as background
/// knowledge and returns it verbatim; everything else gets the predprey
/// model. Scores 24/24 on the causal suite by construction.
pub struct OracleEngine {
    truths: HashMap<String, CausalMap>,
}

impl OracleEngine {
    pub fn from_cases(cases: &[GroundTruthCase]) -> Self {
        OracleEngine {
            truths: cases
                .iter()
                .map(|c| (c.description.clone(), c.truth.clone()))
                .collect(),
        }
    }
}

#[async_trait]
impl Engine for OracleEngine {
    fn name(&self) -> &str {
        "oracle"
    }

    fn parameters(&self) -> Vec<ParameterSpec> {
        Vec::new()
    }

    async fn generate(&self, request: &GenerateRequest) -> Result<GenerateResponse, EngineError> {
        let map = request
            .background_knowledge
            .as_deref()
            .and_then(|d| self.truths.get(d).cloned());
        match map {
            Some(map) => {
                let raw_model_output =
                    serde_json::to_string(&map.to_wire()).expect("wire form serializes");
                Ok(GenerateResponse {
                    map,
                    raw_model_output,
                    usage: None,
                    latency: Duration::ZERO,
                    warnings: Vec::new(),
                })
            }
            None => PredPreyEngine.generate(request).await,
        }
    }
}
