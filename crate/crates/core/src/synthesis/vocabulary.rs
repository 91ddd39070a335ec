//! The gibberish noun pool backing ground-truth generation.
//!
//! Variable names are drawn from invented nouns so a model cannot lean on
//! training-data context; it has to read the causal sentences. The pool is
//! exactly 56 singular nouns, pluralized uniformly by appending "s" (nouns
//! ending in "s" or "y" are excluded so that rule never bends).

use super::SynthesisError;

pub const VOCABULARY_SIZE: usize = 56;

const DEFAULT_VOCABULARY: &str = include_str!("../../data/vocabulary.txt");

/// Uniform pluralization: append "s".
pub fn pluralize(noun: &str) -> Result<String, SynthesisError> {
    if noun.is_empty() {
        return Err(SynthesisError::EmptyNoun);
    }
    if noun.ends_with('s') {
        return Err(SynthesisError::UnpluralizableNoun {
            noun: noun.to_string(),
        });
    }
    Ok(format!("{noun}s"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    nouns: Vec<String>,
}

impl Vocabulary {
    /// The built-in 56-noun list.
    pub fn builtin() -> Self {
        Self::from_lines(DEFAULT_VOCABULARY).expect("built-in vocabulary is valid")
    }

    /// Parse one noun per line, ignoring blank lines. Enforces the pool
    /// invariants: exactly 56 entries, lowercase, unique, no trailing "s"
    /// or "y".
    pub fn from_lines(text: &str) -> Result<Self, SynthesisError> {
        let nouns: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        Self::from_nouns(nouns)
    }

    pub fn from_nouns(nouns: Vec<String>) -> Result<Self, SynthesisError> {
        if nouns.len() != VOCABULARY_SIZE {
            return Err(SynthesisError::VocabularySize { found: nouns.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for noun in &nouns {
            if noun.is_empty() {
                return Err(SynthesisError::EmptyNoun);
            }
            if *noun != noun.to_lowercase() {
                return Err(SynthesisError::VocabularyCase { noun: noun.clone() });
            }
            if noun.ends_with('s') || noun.ends_with('y') {
                return Err(SynthesisError::UnpluralizableNoun { noun: noun.clone() });
            }
            if !seen.insert(noun.clone()) {
                return Err(SynthesisError::VocabularyDuplicate { noun: noun.clone() });
            }
        }
        Ok(Vocabulary { nouns })
    }

    pub fn len(&self) -> usize {
        self.nouns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nouns.is_empty()
    }

    pub fn noun(&self, index: usize) -> &str {
        &self.nouns[index]
    }

    /// Pluralized noun at `index`.
    pub fn variable(&self, index: usize) -> String {
        pluralize(&self.nouns[index]).expect("vocabulary invariant bans trailing s")
    }

    pub fn nouns(&self) -> impl Iterator<Item = &str> {
        self.nouns.iter().map(String::as_str)
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::builtin()
    }
}
