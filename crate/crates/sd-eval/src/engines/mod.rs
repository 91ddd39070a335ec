//! The pluggable engine abstraction: an engine turns a generation request
//! (prompt, background, current map, parameters) into a causal map. Three
//! engines ship built in: `predprey` (a fixed dummy model), and the
//! LLM-backed `default` and `advanced` engines, which are identical under
//! default settings.

mod llm;
mod parse;
mod predprey;
mod prompt;
mod provider;

pub use llm::{LlmEngine, ADVANCED_ENGINE, DEFAULT_ENGINE};
pub use parse::{parse_structured_map, ParseError};
pub use predprey::PredPreyEngine;
pub use prompt::{build_prompt, ChatMessage, PromptTexts, Role};
pub use provider::{
    causal_map_schema, CompletionRequest, ProviderClient, ProviderConfig, ProviderError,
    ProviderMode, ReasoningEffort, Transcript, DEFAULT_API_KEY_ENV,
};

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use sd_eval_core::graph::CausalMap;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unknown engine {name:?}; available engines: {}", available.join(", "))]
    UnknownEngine { name: String, available: Vec<String> },
    #[error("engine {name:?} is already registered")]
    AlreadyRegistered { name: String },
    #[error("unknown parameter {name:?}; valid parameters: {}", valid.join(", "))]
    UnknownParameter { name: String, valid: Vec<String> },
    #[error("parameter {name:?} must be a {expected}")]
    ParameterType { name: String, expected: &'static str },
    #[error("prompt must not be empty")]
    EmptyPrompt,
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("model output is not a causal map: {0}")]
    Parse(#[from] ParseError),
}

/// The kind of value an engine parameter accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum ParameterKind {
    Text,
    Integer,
    Boolean,
    Choice { options: Vec<String> },
}

/// One engine input beyond the generic prompt and current model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParameterSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParameterKind,
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<Value>,
    pub description: String,
}

impl ParameterSpec {
    pub fn text(name: &str, default: Option<&str>, description: &str) -> Self {
        ParameterSpec {
            name: name.to_string(),
            kind: ParameterKind::Text,
            required: false,
            default: default.map(|d| Value::String(d.to_string())),
            description: description.to_string(),
        }
    }

    fn type_check(&self, value: &Value) -> Result<(), EngineError> {
        let ok = match &self.kind {
            ParameterKind::Text => value.is_string(),
            ParameterKind::Integer => value.is_i64() || value.is_u64(),
            ParameterKind::Boolean => value.is_boolean(),
            ParameterKind::Choice { options } => value
                .as_str()
                .map(|s| options.iter().any(|o| o == s))
                .unwrap_or(false),
        };
        if ok {
            Ok(())
        } else {
            Err(EngineError::ParameterType {
                name: self.name.clone(),
                expected: match &self.kind {
                    ParameterKind::Text => "string",
                    ParameterKind::Integer => "integer",
                    ParameterKind::Boolean => "boolean",
                    ParameterKind::Choice { .. } => "string from the listed options",
                },
            })
        }
    }
}

/// What an engine is asked to do.
#[derive(Debug, Clone, Default)]
pub struct GenerateRequest {
    pub prompt: String,
    pub problem_statement: Option<String>,
    pub background_knowledge: Option<String>,
    pub current_map: Option<CausalMap>,
    pub parameters: serde_json::Map<String, Value>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// What came back: the parsed map plus the verbatim model output for audit.
#[derive(Debug, Clone)]
pub struct GenerateResponse {
    pub map: CausalMap,
    pub raw_model_output: String,
    pub usage: Option<TokenUsage>,
    pub latency: Duration,
    pub warnings: Vec<String>,
}

/// A model-content generator. Engines are stateless between calls; one
/// instance may serve concurrent generate calls.
#[async_trait]
pub trait Engine: Send + Sync {
    fn name(&self) -> &str;

    /// The parameters this engine operates on, with defaults.
    fn parameters(&self) -> Vec<ParameterSpec>;

    async fn generate(&self, request: &GenerateRequest) -> Result<GenerateResponse, EngineError>;
}

/// Reject parameters an engine does not declare and type-check the rest.
pub fn validate_parameters(
    specs: &[ParameterSpec],
    values: &serde_json::Map<String, Value>,
) -> Result<(), EngineError> {
    let valid: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    for (name, value) in values {
        let spec = specs.iter().find(|s| &s.name == name).ok_or_else(|| {
            EngineError::UnknownParameter {
                name: name.clone(),
                valid: valid.clone(),
            }
        })?;
        spec.type_check(value)?;
    }
    Ok(())
}

/// Name -> engine lookup. Write-once at startup, read-only while serving.
#[derive(Default)]
pub struct EngineRegistry {
    engines: BTreeMap<String, Arc<dyn Engine>>,
}

impl EngineRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The reference build: predprey, default, advanced.
    pub fn builtin(provider: Arc<ProviderClient>) -> Self {
        let mut registry = Self::new();
        registry
            .register(Arc::new(PredPreyEngine))
            .expect("fresh registry");
        registry
            .register(Arc::new(LlmEngine::default_engine(provider.clone())))
            .expect("fresh registry");
        registry
            .register(Arc::new(LlmEngine::advanced_engine(provider)))
            .expect("fresh registry");
        registry
    }

    pub fn register(&mut self, engine: Arc<dyn Engine>) -> Result<(), EngineError> {
        let name = engine.name().to_string();
        if self.engines.contains_key(&name) {
            return Err(EngineError::AlreadyRegistered { name });
        }
        self.engines.insert(name, engine);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Engine>, EngineError> {
        self.engines
            .get(name)
            .cloned()
            .ok_or_else(|| EngineError::UnknownEngine {
                name: name.to_string(),
                available: self.names(),
            })
    }

    /// Engine names, sorted.
    pub fn names(&self) -> Vec<String> {
        self.engines.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.engines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.engines.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_lists_the_three_engines_sorted() {
        let provider = Arc::new(ProviderClient::new(
            ProviderConfig::default(),
            ProviderMode::Live,
        ));
        let registry = EngineRegistry::builtin(provider);
        assert_eq!(registry.names(), ["advanced", "default", "predprey"]);
    }

    #[test]
    fn registration_extends_the_catalog() {
        let provider = Arc::new(ProviderClient::new(
            ProviderConfig::default(),
            ProviderMode::Live,
        ));
        let mut registry = EngineRegistry::builtin(provider);
        registry.register(Arc::new(PredPreyEngine2)).unwrap();
        assert_eq!(registry.len(), 4);
        assert!(registry.names().contains(&"myengine".to_string()));
    }

    #[test]
    fn unknown_engine_error_carries_the_catalog() {
        let registry = EngineRegistry::new();
        let Err(err) = registry.get("nope") else {
            panic!("lookup must fail");
        };
        match err {
            EngineError::UnknownEngine { name, available } => {
                assert_eq!(name, "nope");
                assert!(available.is_empty());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    struct PredPreyEngine2;

    #[async_trait]
    impl Engine for PredPreyEngine2 {
        fn name(&self) -> &str {
            "myengine"
        }
        fn parameters(&self) -> Vec<ParameterSpec> {
            Vec::new()
        }
        async fn generate(
            &self,
            request: &GenerateRequest,
        ) -> Result<GenerateResponse, EngineError> {
            PredPreyEngine.generate(request).await
        }
    }
}
