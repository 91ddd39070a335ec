//! OpenAI-compatible chat-completions client with constrained output,
//! retry with exponential backoff, an in-flight cap, and record/replay.
//!
//! Replay makes the whole harness testable offline: every exchange can be
//! persisted as a transcript keyed by a request hash and later answered
//! byte-exact from disk with no network and no API key.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;
use tokio::sync::Semaphore;

use super::prompt::ChatMessage;
use super::TokenUsage;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("api key environment variable {env_var} is not set")]
    MissingApiKey { env_var: String },
    #[error("provider returned {status}: {body}")]
    Provider { status: u16, body: String },
    #[error("transport failure after {attempts} attempt(s): {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("provider response is not a chat completion: {0}")]
    MalformedResponse(String),
    #[error("no transcript {hash}.json under {dir}")]
    TranscriptMissing { hash: String, dir: PathBuf },
    #[error("transcript io failure at {path}: {detail}")]
    TranscriptIo { path: PathBuf, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReasoningEffort {
    Low,
    Medium,
    High,
}

impl std::str::FromStr for ReasoningEffort {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(ReasoningEffort::Low),
            "medium" => Ok(ReasoningEffort::Medium),
            "high" => Ok(ReasoningEffort::High),
            other => Err(format!("not a reasoning effort: {other:?}")),
        }
    }
}

/// Where and how to reach the model provider.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProviderConfig {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key. The key
    /// itself never lives in config or reports.
    pub api_key_env: String,
    #[serde(with = "duration_ms")]
    pub timeout: Duration,
    pub max_retries: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reasoning_effort: Option<ReasoningEffort>,
    /// First backoff sleep; doubles per retry, with jitter.
    #[serde(with = "duration_ms")]
    pub backoff_base: Duration,
    /// Maximum concurrent requests to this provider.
    pub max_in_flight: usize,
}

mod duration_ms {
    use super::Duration;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

pub const DEFAULT_API_KEY_ENV: &str = "SD_EVAL_API_KEY";

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            base_url: "https://api.openai.com/v1".to_string(),
            model: "gpt-4o".to_string(),
            api_key_env: DEFAULT_API_KEY_ENV.to_string(),
            timeout: Duration::from_secs(120),
            max_retries: 3,
            reasoning_effort: None,
            backoff_base: Duration::from_secs(1),
            max_in_flight: 4,
        }
    }
}

/// Live network, live + persist transcripts, or transcripts only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderMode {
    Live,
    Record(PathBuf),
    Replay(PathBuf),
}

/// One persisted exchange.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transcript {
    pub request_hash: String,
    pub messages: Vec<ChatMessage>,
    pub response_body: String,
    pub model: String,
    pub timestamp: String,
}

/// One completion to perform: the engine supplies the model selection and
/// message list; everything else comes from the provider config.
#[derive(Debug, Clone)]
pub struct CompletionRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub reasoning_effort: Option<ReasoningEffort>,
}

#[derive(Debug, Clone)]
pub struct CompletionReply {
    pub content: String,
    pub usage: Option<TokenUsage>,
}

/// The JSON schema attached as the constrained-output response format:
/// `variables[]` and `relationships[]{from,to,polarity,reasoning}`.
pub fn causal_map_schema() -> Value {
    json!({
        "type": "object",
        "properties": {
            "variables": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": { "name": { "type": "string" } },
                    "required": ["name"],
                    "additionalProperties": false
                }
            },
            "relationships": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "from": { "type": "string" },
                        "to": { "type": "string" },
                        "polarity": { "type": "string", "enum": ["+", "-"] },
                        "reasoning": { "type": "string" }
                    },
                    "required": ["from", "to", "polarity", "reasoning"],
                    "additionalProperties": false
                }
            }
        },
        "required": ["variables", "relationships"],
        "additionalProperties": false
    })
}

pub struct ProviderClient {
    config: ProviderConfig,
    mode: ProviderMode,
    http: reqwest::Client,
    in_flight: Arc<Semaphore>,
}

impl ProviderClient {
    pub fn new(config: ProviderConfig, mode: ProviderMode) -> Self {
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .expect("reqwest client builds");
        let in_flight = Arc::new(Semaphore::new(config.max_in_flight.max(1)));
        ProviderClient {
            config,
            mode,
            http,
            in_flight,
        }
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn mode(&self) -> &ProviderMode {
        &self.mode
    }

    /// Content-addressed identity of a request: model plus messages.
    pub fn request_hash(model: &str, messages: &[ChatMessage]) -> String {
        let canonical = serde_json::to_string(&json!({
            "model": model,
            "messages": messages,
        }))
        .expect("messages serialize");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Issue exactly one chat completion (plus transparent retries on
    /// transient failures) and return the assistant content verbatim.
    pub async fn complete(
        &self,
        request: &CompletionRequest,
    ) -> Result<CompletionReply, ProviderError> {
        let hash = Self::request_hash(&request.model, &request.messages);

        if let ProviderMode::Replay(dir) = &self.mode {
            return self.replay(dir, &hash);
        }

        let api_key = std::env::var(&self.config.api_key_env).map_err(|_| {
            ProviderError::MissingApiKey {
                env_var: self.config.api_key_env.clone(),
            }
        })?;

        let _permit = self
            .in_flight
            .acquire()
            .await
            .expect("semaphore never closed");

        let mut body = json!({
            "model": request.model,
            "messages": request.messages,
            "response_format": {
                "type": "json_schema",
                "json_schema": {
                    "name": "causal_map",
                    "strict": true,
                    "schema": causal_map_schema(),
                }
            }
        });
        if let Some(effort) = request.reasoning_effort {
            body["reasoning_effort"] = serde_json::to_value(effort).expect("serializes");
        }

        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let mut attempt = 0u32;
        let reply = loop {
            attempt += 1;
            let sent = self
                .http
                .post(&url)
                .bearer_auth(&api_key)
                .json(&body)
                .send()
                .await;
            match sent {
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        let payload: Value = response.json().await.map_err(|e| {
                            ProviderError::MalformedResponse(e.to_string())
                        })?;
                        break parse_completion(&payload)?;
                    }
                    let retryable = status.as_u16() == 429 || status.is_server_error();
                    if !retryable || attempt > self.config.max_retries {
                        let text = response.text().await.unwrap_or_default();
                        if retryable {
                            return Err(ProviderError::Transport {
                                attempts: attempt,
                                detail: format!("{status}: {text}"),
                            });
                        }
                        return Err(ProviderError::Provider {
                            status: status.as_u16(),
                            body: text,
                        });
                    }
                }
                Err(e) => {
                    if attempt > self.config.max_retries {
                        return Err(ProviderError::Transport {
                            attempts: attempt,
                            detail: e.to_string(),
                        });
                    }
                }
            }
            tokio::time::sleep(self.backoff(attempt)).await;
        };

        if let ProviderMode::Record(dir) = &self.mode {
            self.record(dir, &hash, request, &reply.content)?;
        }
        Ok(reply)
    }

    /// Exponential backoff with up to 25% jitter.
    fn backoff(&self, attempt: u32) -> Duration {
        let base = self.config.backoff_base.as_millis() as u64;
        let scaled = base.saturating_mul(1u64 << (attempt - 1).min(16));
        let jitter = rand::rng().random_range(0..=scaled / 4);
        Duration::from_millis(scaled + jitter)
    }

    fn replay(&self, dir: &Path, hash: &str) -> Result<CompletionReply, ProviderError> {
        let path = dir.join(format!("{hash}.json"));
        if !path.exists() {
            return Err(ProviderError::TranscriptMissing {
                hash: hash.to_string(),
                dir: dir.to_path_buf(),
            });
        }
        let text = std::fs::read_to_string(&path).map_err(|e| ProviderError::TranscriptIo {
            path: path.clone(),
            detail: e.to_string(),
        })?;
        let transcript: Transcript =
            serde_json::from_str(&text).map_err(|e| ProviderError::TranscriptIo {
                path,
                detail: e.to_string(),
            })?;
        Ok(CompletionReply {
            content: transcript.response_body,
            usage: None,
        })
    }

    fn record(
        &self,
        dir: &Path,
        hash: &str,
        request: &CompletionRequest,
        content: &str,
    ) -> Result<(), ProviderError> {
        let transcript = Transcript {
            request_hash: hash.to_string(),
            messages: request.messages.clone(),
            response_body: content.to_string(),
            model: request.model.clone(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        };
        std::fs::create_dir_all(dir).map_err(|e| ProviderError::TranscriptIo {
            path: dir.to_path_buf(),
            detail: e.to_string(),
        })?;
        let path = dir.join(format!("{hash}.json"));
        let body = serde_json::to_string_pretty(&transcript).expect("transcript serializes");
        std::fs::write(&path, body).map_err(|e| ProviderError::TranscriptIo {
            path,
            detail: e.to_string(),
        })
    }
}

fn parse_completion(payload: &Value) -> Result<CompletionReply, ProviderError> {
    let content = payload
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| {
            ProviderError::MalformedResponse("missing choices[0].message.content".to_string())
        })?
        .to_string();
    let usage = payload.get("usage").map(|u| TokenUsage {
        prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
        completion_tokens: u
            .get("completion_tokens")
            .and_then(Value::as_u64)
            .unwrap_or(0),
    });
    Ok(CompletionReply { content, usage })
}
