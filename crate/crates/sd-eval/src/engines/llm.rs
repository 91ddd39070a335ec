//! The LLM-backed engines. Both run the same zero-shot, one-pass scheme;
//! the advanced engine additionally exposes every prompt-text segment and
//! the model selection as parameters, while the default engine pins them.

use std::sync::Arc;
use std::time::Instant;

use async_trait::async_trait;
use serde_json::Value;

use super::prompt::{build_prompt, PromptTexts};
use super::provider::{CompletionRequest, ProviderClient, ReasoningEffort};
use super::{
    parse_structured_map, validate_parameters, Engine, EngineError, GenerateRequest,
    GenerateResponse, ParameterKind, ParameterSpec,
};

pub const DEFAULT_ENGINE: &str = "default";
pub const ADVANCED_ENGINE: &str = "advanced";

pub struct LlmEngine {
    name: &'static str,
    provider: Arc<ProviderClient>,
    texts: PromptTexts,
    customizable: bool,
}

impl LlmEngine {
    /// The commonly-used subset: model selection only, defaults for the rest.
    pub fn default_engine(provider: Arc<ProviderClient>) -> Self {
        LlmEngine {
            name: DEFAULT_ENGINE,
            provider,
            texts: PromptTexts::default(),
            customizable: false,
        }
    }

    /// Everything end-user customizable: prompt texts, model, reasoning.
    pub fn advanced_engine(provider: Arc<ProviderClient>) -> Self {
        LlmEngine {
            name: ADVANCED_ENGINE,
            provider,
            texts: PromptTexts::default(),
            customizable: true,
        }
    }

    fn text_override(request: &GenerateRequest, name: &str, into: &mut String) {
        if let Some(Value::String(text)) = request.parameters.get(name) {
            *into = text.clone();
        }
    }

    fn resolve_texts(&self, request: &GenerateRequest) -> PromptTexts {
        let mut texts = self.texts.clone();
        if self.customizable {
            Self::text_override(request, "system_prompt", &mut texts.system_prompt);
            Self::text_override(request, "feedback_emphasis", &mut texts.feedback_emphasis);
            Self::text_override(
                request,
                "problem_statement_header",
                &mut texts.problem_statement_header,
            );
            Self::text_override(
                request,
                "background_knowledge_header",
                &mut texts.background_knowledge_header,
            );
        }
        texts
    }
}

#[async_trait]
impl Engine for LlmEngine {
    fn name(&self) -> &str {
        self.name
    }

    fn parameters(&self) -> Vec<ParameterSpec> {
        let config = self.provider.config();
        let mut specs = vec![ParameterSpec::text(
            "model",
            Some(&config.model),
            "Identifier of the underlying LLM",
        )];
        if self.customizable {
            specs.push(ParameterSpec {
                name: "reasoning_effort".to_string(),
                kind: ParameterKind::Choice {
                    options: vec!["low".into(), "medium".into(), "high".into()],
                },
                required: false,
                default: config
                    .reasoning_effort
                    .map(|e| serde_json::to_value(e).expect("serializes")),
                description: "Reasoning effort, for models that accept it".to_string(),
            });
            specs.push(ParameterSpec::text(
                "system_prompt",
                Some(&self.texts.system_prompt),
                "Role framing and relationship/polarity semantics",
            ));
            specs.push(ParameterSpec::text(
                "feedback_emphasis",
                Some(&self.texts.feedback_emphasis),
                "Statement about the importance of returning feedback",
            ));
            specs.push(ParameterSpec::text(
                "problem_statement_header",
                Some(&self.texts.problem_statement_header),
                "Text introducing the problem statement",
            ));
            specs.push(ParameterSpec::text(
                "background_knowledge_header",
                Some(&self.texts.background_knowledge_header),
                "Text introducing the background knowledge",
            ));
        }
        specs
    }

    async fn generate(&self, request: &GenerateRequest) -> Result<GenerateResponse, EngineError> {
        if request.prompt.trim().is_empty() {
            return Err(EngineError::EmptyPrompt);
        }
        validate_parameters(&self.parameters(), &request.parameters)?;

        let config = self.provider.config();
        let model = request
            .parameters
            .get("model")
            .and_then(Value::as_str)
            .unwrap_or(&config.model)
            .to_string();
        let reasoning_effort = match request.parameters.get("reasoning_effort") {
            Some(Value::String(s)) => Some(s.parse::<ReasoningEffort>().map_err(|_| {
                EngineError::ParameterType {
                    name: "reasoning_effort".to_string(),
                    expected: "string from the listed options",
                }
            })?),
            _ => config.reasoning_effort,
        };

        let texts = self.resolve_texts(request);
        let messages = build_prompt(request, &texts);

        let started = Instant::now();
        let reply = self
            .provider
            .complete(&CompletionRequest {
                model,
                messages,
                reasoning_effort,
            })
            .await?;
        let latency = started.elapsed();

        let (map, map_warnings) = parse_structured_map(&reply.content)?;
        Ok(GenerateResponse {
            map,
            raw_model_output: reply.content,
            usage: reply.usage,
            latency,
            warnings: map_warnings.iter().map(|w| w.to_string()).collect(),
        })
    }
}
