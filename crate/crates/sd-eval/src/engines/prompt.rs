//! The zero-shot, one-pass prompt scheme.
//!
//! One system message establishes the modeling role, the relationship and
//! polarity semantics, and the importance of feedback; the problem
//! statement and background knowledge are appended to it when present. An
//! in-progress model rides in as an assistant-role message in wire form.
//! The user message is the prompt. No worked examples anywhere.

use serde::{Deserialize, Serialize};

use sd_eval_core::graph::CausalMap;

use super::GenerateRequest;

pub const DEFAULT_SYSTEM_PROMPT: &str = "\
You are an expert system dynamics modeler. You build qualitative causal maps: directed \
graphs of named variables connected by causal relationships. Each relationship has a \
\"from\" variable (the cause), a \"to\" variable (the effect), and a polarity. Polarity \
\"+\" means the effect moves in the same direction as the cause: when the cause increases \
the effect increases, and when the cause decreases the effect decreases. Polarity \"-\" \
means the effect moves opposite to the cause: when the cause increases the effect \
decreases, and when the cause decreases the effect increases. Name variables as concise \
noun phrases, use the same spelling for a variable everywhere it appears, and record a \
short reasoning note for each relationship.";

pub const DEFAULT_FEEDBACK_EMPHASIS: &str = "\
Feedback is what makes a causal map useful. It is very important that your response \
surfaces the feedback loops present in the system being described: prefer structure that \
closes loops over long causal chains that never feed back into the rest of the system.";

pub const DEFAULT_PROBLEM_STATEMENT_HEADER: &str = "The user is working on this problem:";

pub const DEFAULT_BACKGROUND_KNOWLEDGE_HEADER: &str =
    "Treat the following background information as the authoritative description of the system:";

/// Every prompt-text segment the scheme uses. The advanced engine exposes
/// all of these for override; the default engine pins them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTexts {
    pub system_prompt: String,
    pub feedback_emphasis: String,
    pub problem_statement_header: String,
    pub background_knowledge_header: String,
}

impl Default for PromptTexts {
    fn default() -> Self {
        PromptTexts {
            system_prompt: DEFAULT_SYSTEM_PROMPT.to_string(),
            feedback_emphasis: DEFAULT_FEEDBACK_EMPHASIS.to_string(),
            problem_statement_header: DEFAULT_PROBLEM_STATEMENT_HEADER.to_string(),
            background_knowledge_header: DEFAULT_BACKGROUND_KNOWLEDGE_HEADER.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    Assistant,
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    fn new(role: Role, content: impl Into<String>) -> Self {
        ChatMessage {
            role,
            content: content.into(),
        }
    }
}

/// Serialize an in-progress model for the assistant message, reasoning
/// included.
pub fn serialize_current_map(map: &CausalMap) -> String {
    serde_json::to_string(&map.to_wire()).expect("wire form serializes")
}

/// Build the ordered message list for one generation. Exactly one request
/// is made per generation; this is its entire conversation.
pub fn build_prompt(request: &GenerateRequest, texts: &PromptTexts) -> Vec<ChatMessage> {
    let mut system = format!("{}\n\n{}", texts.system_prompt, texts.feedback_emphasis);
    if let Some(problem) = request
        .problem_statement
        .as_deref()
        .filter(|s| !s.trim().is_empty())
    {
        system.push_str("\n\n");
        system.push_str(&texts.problem_statement_header);
        system.push('\n');
        system.push_str(problem);
    }
    if let Some(background) = request
        .background_knowledge
        .as_deref()
        .filter(|s| !s.trim().is_empty())
    {
        system.push_str("\n\n");
        system.push_str(&texts.background_knowledge_header);
        system.push('\n');
        system.push_str(background);
    }

    let mut messages = vec![ChatMessage::new(Role::System, system)];
    if let Some(map) = &request.current_map {
        messages.push(ChatMessage::new(Role::Assistant, serialize_current_map(map)));
    }
    messages.push(ChatMessage::new(Role::User, request.prompt.clone()));
    messages
}

#[cfg(test)]
mod tests {
    use super::*;
    use sd_eval_core::graph::Polarity;

    fn request(prompt: &str) -> GenerateRequest {
        GenerateRequest {
            prompt: prompt.into(),
            ..GenerateRequest::default()
        }
    }

    #[test]
    fn minimal_request_is_system_plus_user() {
        let messages = build_prompt(&request("draw me a map"), &PromptTexts::default());
        assert_eq!(messages.len(), 2);
        assert_eq!(messages[0].role, Role::System);
        assert_eq!(messages[1].role, Role::User);
        assert_eq!(messages[1].content, "draw me a map");
    }

    #[test]
    fn background_and_problem_ride_in_the_system_message() {
        let mut req = request("go");
        req.problem_statement = Some("too much road rage".into());
        req.background_knowledge = Some("drivers get angry in traffic".into());
        let messages = build_prompt(&req, &PromptTexts::default());
        assert_eq!(messages.len(), 2);
        let system = &messages[0].content;
        assert!(system.contains("too much road rage"));
        assert!(system.contains("drivers get angry in traffic"));
    }

    #[test]
    fn empty_background_is_omitted() {
        let mut req = request("go");
        req.background_knowledge = Some("   ".into());
        let messages = build_prompt(&req, &PromptTexts::default());
        assert!(!messages[0]
            .content
            .contains(DEFAULT_BACKGROUND_KNOWLEDGE_HEADER));
    }

    #[test]
    fn current_map_becomes_an_assistant_message_with_reasoning() {
        let mut map = CausalMap::new();
        map.add_relationship(
            "taxation",
            "anti-british sentiment",
            Polarity::Positive,
            Some("taxes anger the colonists".into()),
        )
        .unwrap();
        let mut req = request("extend this");
        req.current_map = Some(map);
        let messages = build_prompt(&req, &PromptTexts::default());
        assert_eq!(messages.len(), 3);
        assert_eq!(messages[1].role, Role::Assistant);
        assert!(messages[1].content.contains("\"from\":\"taxation\""));
        assert!(messages[1]
            .content
            .contains("taxes anger the colonists"));
    }

    #[test]
    fn no_current_map_means_no_assistant_message() {
        let messages = build_prompt(&request("x"), &PromptTexts::default());
        assert!(messages.iter().all(|m| m.role != Role::Assistant));
    }
}
