//! REST facade over the engine registry, so external modeling tools can
//! list engines, inspect their parameters, and generate models.
//!
//! Stateless: every request is independent and any non-2xx response body
//! is exactly one error document `{status, code, message}`.

use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, Request, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use sd_eval_core::graph::{CausalMap, WireMap};

use crate::engines::{
    EngineError, EngineRegistry, GenerateRequest, ParameterSpec, ParseError, ProviderError,
    TokenUsage,
};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";
pub const ADDR_ENV: &str = "SD_EVAL_ADDR";
const MAX_BODY_BYTES: usize = 1024 * 1024;

/// One error document; every non-2xx response carries exactly one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(err: EngineError) -> Self {
        match &err {
            EngineError::UnknownEngine { .. } => {
                Self::new(StatusCode::NOT_FOUND, "engine_not_found", err.to_string())
            }
            EngineError::UnknownParameter { .. }
            | EngineError::ParameterType { .. }
            | EngineError::EmptyPrompt => Self::bad_request(err.to_string()),
            EngineError::Provider(provider) => match provider {
                ProviderError::MissingApiKey { .. } => {
                    Self::new(StatusCode::BAD_GATEWAY, "provider_error", err.to_string())
                }
                _ => Self::new(StatusCode::BAD_GATEWAY, "provider_error", err.to_string()),
            },
            EngineError::Parse(ParseError::MalformedJson(_))
            | EngineError::Parse(ParseError::Schema(_)) => {
                Self::new(StatusCode::BAD_GATEWAY, "malformed_model", err.to_string())
            }
            EngineError::AlreadyRegistered { .. } => Self::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                err.to_string(),
            ),
        }
    }
}

#[derive(Clone)]
pub struct ServiceState {
    pub registry: Arc<EngineRegistry>,
    /// Generate handler deadline: provider timeout plus slack.
    pub request_timeout: Duration,
}

impl ServiceState {
    pub fn new(registry: Arc<EngineRegistry>, provider_timeout: Duration) -> Self {
        ServiceState {
            registry,
            request_timeout: provider_timeout + Duration::from_secs(5),
        }
    }
}

pub fn router(state: ServiceState) -> Router {
    Router::new()
        .route("/api/v1/engines", get(list_engines))
        .route("/api/v1/engines/{name}/parameters", get(engine_parameters))
        .route("/api/v1/engines/{name}/generate", post(generate))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .layer(axum::middleware::map_response(enveloped_errors))
        .with_state(state)
}

/// Guarantee the error-document invariant even for responses produced by
/// the framework itself (body-limit, method mismatch, panics).
async fn enveloped_errors(response: Response) -> Response {
    let status = response.status();
    if status.is_success() {
        return response;
    }
    let is_json = response
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| v.starts_with("application/json"))
        .unwrap_or(false);
    if is_json {
        return response;
    }
    let code = match status {
        StatusCode::NOT_FOUND => "not_found",
        StatusCode::METHOD_NOT_ALLOWED => "method_not_allowed",
        StatusCode::PAYLOAD_TOO_LARGE => "payload_too_large",
        _ => "error",
    };
    ApiError::new(status, code, status.to_string()).into_response()
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
}

#[derive(Serialize)]
struct EngineEntry {
    name: String,
}

#[derive(Serialize)]
struct EnginesReply {
    engines: Vec<EngineEntry>,
}

async fn list_engines(State(state): State<ServiceState>) -> Json<EnginesReply> {
    Json(EnginesReply {
        engines: state
            .registry
            .names()
            .into_iter()
            .map(|name| EngineEntry { name })
            .collect(),
    })
}

#[derive(Serialize)]
struct ParametersReply {
    parameters: Vec<ParameterSpec>,
}

async fn engine_parameters(
    State(state): State<ServiceState>,
    Path(name): Path<String>,
) -> Result<Json<ParametersReply>, ApiError> {
    let engine = state.registry.get(&name)?;
    Ok(Json(ParametersReply {
        parameters: engine.parameters(),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct GenerateBody {
    prompt: String,
    #[serde(default)]
    problem_statement: Option<String>,
    #[serde(default)]
    background_knowledge: Option<String>,
    #[serde(default)]
    current_model: Option<WireMap>,
    #[serde(default)]
    parameters: Option<serde_json::Map<String, Value>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SupportingInfo {
    latency_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    usage: Option<TokenUsage>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GenerateReply {
    model: WireMap,
    supporting_info: SupportingInfo,
}

async fn generate(
    State(state): State<ServiceState>,
    Path(name): Path<String>,
    body: Request<Body>,
) -> Result<Json<GenerateReply>, ApiError> {
    let engine = state.registry.get(&name)?;

    let bytes = axum::body::to_bytes(body.into_body(), MAX_BODY_BYTES)
        .await
        .map_err(|e| ApiError::bad_request(format!("unreadable body: {e}")))?;
    let body: GenerateBody = serde_json::from_slice(&bytes)
        .map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))?;
    if body.prompt.trim().is_empty() {
        return Err(ApiError::bad_request("prompt must not be empty"));
    }

    let mut current_warnings = Vec::new();
    let current_map = match &body.current_model {
        Some(wire) => {
            let (map, warnings) = CausalMap::from_wire(wire)
                .map_err(|e| ApiError::bad_request(format!("invalid currentModel: {e}")))?;
            current_warnings.extend(warnings.iter().map(|w| w.to_string()));
            Some(map)
        }
        None => None,
    };

    let request = GenerateRequest {
        prompt: body.prompt,
        problem_statement: body.problem_statement,
        background_knowledge: body.background_knowledge,
        current_map,
        parameters: body.parameters.unwrap_or_default(),
    };

    let response = tokio::time::timeout(state.request_timeout, engine.generate(&request))
        .await
        .map_err(|_| {
            ApiError::new(
                StatusCode::BAD_GATEWAY,
                "provider_error",
                "engine timed out",
            )
        })??;

    let mut warnings = current_warnings;
    warnings.extend(response.warnings.iter().cloned());
    Ok(Json(GenerateReply {
        model: response.map.to_wire(),
        supporting_info: SupportingInfo {
            latency_ms: response.latency.as_millis(),
            usage: response.usage,
            warnings,
        },
    }))
}

/// Bind and serve until ctrl-c.
pub async fn serve(addr: &str, state: ServiceState) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    println!("sd-eval service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}
