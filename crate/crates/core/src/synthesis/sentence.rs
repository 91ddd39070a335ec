//! The causal sentence template and its strict inverse parser.
//!
//! Every ground-truth relationship is narrated by exactly one sentence of
//! the form `The [more|less] X there are, the [more|fewer] Y there are.`
//! The adjective pair is forced by polarity and polarity direction, so the
//! sentence and the (from, to, polarity) triple are mutually recoverable.

use serde::{Deserialize, Serialize};

use crate::graph::Polarity;

use super::vocabulary::pluralize;
use super::SynthesisError;

/// Whether the sentence narrates the link starting from an increase ("up")
/// or a decrease ("down") in the cause variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn alternating_from_up(index: usize) -> Self {
        if index.is_multiple_of(2) {
            Direction::Up
        } else {
            Direction::Down
        }
    }
}

/// One causal sentence to be rendered: singular nouns plus polarity and
/// direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalSentenceSpec {
    pub from: String,
    pub to: String,
    pub polarity: Polarity,
    pub direction: Direction,
}

/// Adjective pair for (polarity, direction): the cause adjective is
/// more/less, the effect adjective is more/fewer.
fn adjectives(polarity: Polarity, direction: Direction) -> (&'static str, &'static str) {
    match (polarity, direction) {
        (Polarity::Positive, Direction::Up) => ("more", "more"),
        (Polarity::Positive, Direction::Down) => ("less", "fewer"),
        (Polarity::Negative, Direction::Up) => ("more", "fewer"),
        (Polarity::Negative, Direction::Down) => ("less", "more"),
    }
}

pub fn render_sentence(spec: &CausalSentenceSpec) -> Result<String, SynthesisError> {
    if spec.from == spec.to {
        return Err(SynthesisError::SelfReference {
            noun: spec.from.clone(),
        });
    }
    let (cause_adj, effect_adj) = adjectives(spec.polarity, spec.direction);
    Ok(format!(
        "The {} {} there are, the {} {} there are.",
        cause_adj,
        pluralize(&spec.from)?,
        effect_adj,
        pluralize(&spec.to)?
    ))
}

/// A sentence recovered by [`parse_sentence`]; variable names come back in
/// their pluralized (ground-truth) form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub from: String,
    pub to: String,
    pub polarity: Polarity,
    pub direction: Direction,
}

/// Strict inverse of [`render_sentence`]: anything off-template is an error.
pub fn parse_sentence(sentence: &str) -> Result<ParsedSentence, SynthesisError> {
    let fail = || SynthesisError::UnparsableSentence {
        sentence: sentence.to_string(),
    };
    let rest = sentence.strip_prefix("The ").ok_or_else(fail)?;
    let rest = rest.strip_suffix(" there are.").ok_or_else(fail)?;
    let (first_half, second_half) = rest.split_once(" there are, the ").ok_or_else(fail)?;

    let (cause_adj, from) = first_half.split_once(' ').ok_or_else(fail)?;
    let (effect_adj, to) = second_half.split_once(' ').ok_or_else(fail)?;

    let direction = match cause_adj {
        "more" => Direction::Up,
        "less" => Direction::Down,
        _ => return Err(fail()),
    };
    let polarity = match (cause_adj, effect_adj) {
        ("more", "more") | ("less", "fewer") => Polarity::Positive,
        ("more", "fewer") | ("less", "more") => Polarity::Negative,
        _ => return Err(fail()),
    };
    if from.is_empty() || to.is_empty() {
        return Err(fail());
    }
    Ok(ParsedSentence {
        from: from.to_string(),
        to: to.to_string(),
        polarity,
        direction,
    })
}

/// Split a description back into its sentences. Sentences always end with
/// "." and never contain one, so the boundary is unambiguous.
pub fn split_description(description: &str) -> Vec<String> {
    description
        .split_inclusive('.')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
