//! Causal-map data model: named variables connected by polarity-labeled
//! causal relationships, plus feedback-loop enumeration and map diffing.

mod diff;
mod loops;

pub use diff::{diff_maps, MapDiff, PolarityMismatch};
pub use loops::{enumerate_loops, enumerate_loops_with_cap, DEFAULT_LOOP_CAP};

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("variable name is empty after trimming whitespace")]
    EmptyName,
    #[error("polarity must be \"+\" or \"-\", got {token:?}")]
    InvalidPolarity { token: String },
    #[error("a feedback loop must contain at least one edge")]
    EmptyLoop,
    #[error("map exceeds the feedback-loop cap of {cap}")]
    LoopExplosion { cap: usize },
}

/// Canonicalize a variable name: trim, collapse internal whitespace runs to
/// single spaces, lowercase. All matching between maps happens on this form.
pub fn normalize_name(raw: &str) -> Result<String, GraphError> {
    let collapsed = collapse_whitespace(raw);
    if collapsed.is_empty() {
        return Err(GraphError::EmptyName);
    }
    Ok(collapsed.to_lowercase())
}

/// Trim and collapse whitespace but keep the author's casing. Used for the
/// human-facing side of a variable (failure messages quote model output).
fn collapse_whitespace(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Sign of a causal link: "+" moves the effect with the cause, "-" against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
        }
    }

    pub fn from_token(token: &str) -> Result<Self, GraphError> {
        match token {
            "+" => Ok(Polarity::Positive),
            "-" => Ok(Polarity::Negative),
            other => Err(GraphError::InvalidPolarity {
                token: other.to_string(),
            }),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Polarity {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Polarity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        Polarity::from_token(&token).map_err(serde::de::Error::custom)
    }
}

/// A directed causal link between two canonical variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relationship {
    pub from: String,
    pub to: String,
    pub polarity: Polarity,
    pub reasoning: Option<String>,
}

impl Relationship {
    /// Log/display form, bit-exact: `{from} --> ({polarity}) {to}`.
    pub fn display_with(&self, from: &str, to: &str) -> String {
        format!("{} --> ({}) {}", from, self.polarity, to)
    }

    /// Display form using the canonical names.
    pub fn display(&self) -> String {
        self.display_with(&self.from, &self.to)
    }
}

/// Whether a feedback loop amplifies or counteracts change: reinforcing iff
/// the number of negative links around the cycle is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopPolarity {
    Reinforcing,
    Balancing,
}

impl fmt::Display for LoopPolarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoopPolarity::Reinforcing => "reinforcing",
            LoopPolarity::Balancing => "balancing",
        })
    }
}

/// Classify a cycle from the ordered polarities of its edges.
pub fn loop_polarity(edges: &[Polarity]) -> Result<LoopPolarity, GraphError> {
    if edges.is_empty() {
        return Err(GraphError::EmptyLoop);
    }
    let negatives = edges.iter().filter(|p| **p == Polarity::Negative).count();
    Ok(if negatives % 2 == 0 {
        LoopPolarity::Reinforcing
    } else {
        LoopPolarity::Balancing
    })
}

/// A simple directed cycle, stored in canonical rotation (lexicographically
/// smallest node first) so two rotations of the same cycle compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeedbackLoop {
    nodes: Vec<String>,
    polarity: LoopPolarity,
}

impl FeedbackLoop {
    pub fn new(nodes: Vec<String>, polarity: LoopPolarity) -> Self {
        let mut nodes = nodes;
        let smallest = nodes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i);
        if let Some(i) = smallest {
            nodes.rotate_left(i);
        }
        FeedbackLoop { nodes, polarity }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn polarity(&self) -> LoopPolarity {
        self.polarity
    }
}

/// Warnings raised while building a map from untrusted wire input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapWarning {
    /// Two relationships shared a (from, to) pair; the later one won.
    DuplicateRelationship { from: String, to: String },
    /// A relationship endpoint was not declared as a variable; it was added.
    UndeclaredVariable { name: String },
}

impl fmt::Display for MapWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapWarning::DuplicateRelationship { from, to } => {
                write!(f, "duplicate relationship ({from}, {to}); keeping the last one")
            }
            MapWarning::UndeclaredVariable { name } => {
                write!(f, "relationship references undeclared variable {name:?}; added it")
            }
        }
    }
}

/// A directed signed graph of named variables. (from, to) is a key: no two
/// relationships share an ordered pair, so a reversed edge is a different
/// relationship. Values are immutable after construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CausalMap {
    /// canonical name -> display name (first spelling seen, whitespace-folded)
    variables: IndexMap<String, String>,
    relationships: IndexMap<(String, String), Relationship>,
}

impl CausalMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a variable, returning its canonical name. Re-adding keeps the
    /// first-seen display spelling.
    pub fn add_variable(&mut self, raw: &str) -> Result<String, GraphError> {
        let canonical = normalize_name(raw)?;
        self.variables
            .entry(canonical.clone())
            .or_insert_with(|| collapse_whitespace(raw));
        Ok(canonical)
    }

    /// Add a relationship, normalizing endpoints and registering them as
    /// variables. A repeated (from, to) pair is merged last-writer-wins and
    /// reported as a warning.
    pub fn add_relationship(
        &mut self,
        from: &str,
        to: &str,
        polarity: Polarity,
        reasoning: Option<String>,
    ) -> Result<Option<MapWarning>, GraphError> {
        let from = self.add_variable(from)?;
        let to = self.add_variable(to)?;
        let key = (from.clone(), to.clone());
        let duplicate = self.relationships.contains_key(&key);
        self.relationships.insert(
            key,
            Relationship {
                from: from.clone(),
                to: to.clone(),
                polarity,
                reasoning,
            },
        );
        Ok(duplicate.then_some(MapWarning::DuplicateRelationship { from, to }))
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn relationship_count(&self) -> usize {
        self.relationships.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty() && self.relationships.is_empty()
    }

    /// Canonical variable names in insertion order.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.variables.keys().map(String::as_str)
    }

    /// Display names in insertion order.
    pub fn display_names(&self) -> impl Iterator<Item = &str> {
        self.variables.values().map(String::as_str)
    }

    pub fn contains_variable(&self, canonical: &str) -> bool {
        self.variables.contains_key(canonical)
    }

    /// Display spelling for a canonical name (falls back to the canonical).
    pub fn display_of<'a>(&'a self, canonical: &'a str) -> &'a str {
        self.variables
            .get(canonical)
            .map(String::as_str)
            .unwrap_or(canonical)
    }

    pub fn relationships(&self) -> impl Iterator<Item = &Relationship> {
        self.relationships.values()
    }

    pub fn relationship(&self, from: &str, to: &str) -> Option<&Relationship> {
        self.relationships.get(&(from.to_string(), to.to_string()))
    }

    /// Display form of one of this map's relationships, using the map's
    /// display spellings for the endpoints.
    pub fn render_relationship(&self, rel: &Relationship) -> String {
        rel.display_with(self.display_of(&rel.from), self.display_of(&rel.to))
    }

    /// All relationships rendered and sorted lexicographically, the order
    /// used by every relationship list in failure messages.
    pub fn rendered_relationships(&self) -> Vec<String> {
        let mut rendered: Vec<String> = self
            .relationships()
            .map(|r| self.render_relationship(r))
            .collect();
        rendered.sort();
        rendered
    }

    /// All simple directed cycles with the default cap.
    pub fn loops(&self) -> Result<Vec<FeedbackLoop>, GraphError> {
        enumerate_loops(self)
    }

    pub fn to_wire(&self) -> WireMap {
        WireMap {
            variables: self
                .variables
                .values()
                .map(|name| WireVariable { name: name.clone() })
                .collect(),
            relationships: self
                .relationships
                .values()
                .map(|r| WireRelationship {
                    from: self.display_of(&r.from).to_string(),
                    to: self.display_of(&r.to).to_string(),
                    polarity: r.polarity.as_str().to_string(),
                    reasoning: r.reasoning.clone(),
                })
                .collect(),
        }
    }

    /// Build a map from wire form. Undeclared relationship endpoints are
    /// repaired (added) with a warning rather than rejected; duplicate
    /// (from, to) pairs merge last-writer-wins with a warning.
    pub fn from_wire(wire: &WireMap) -> Result<(Self, Vec<MapWarning>), GraphError> {
        let mut map = CausalMap::new();
        let mut warnings = Vec::new();
        for v in &wire.variables {
            map.add_variable(&v.name)?;
        }
        for r in &wire.relationships {
            let polarity = Polarity::from_token(&r.polarity)?;
            for endpoint in [&r.from, &r.to] {
                let canonical = normalize_name(endpoint)?;
                if !map.contains_variable(&canonical) {
                    warnings.push(MapWarning::UndeclaredVariable {
                        name: canonical.clone(),
                    });
                }
            }
            if let Some(w) = map.add_relationship(&r.from, &r.to, polarity, r.reasoning.clone())? {
                warnings.push(w);
            }
        }
        Ok((map, warnings))
    }
}

/// JSON wire form shared by engines, the REST service, and suite fixtures:
/// `{"variables":[{"name":...}],"relationships":[{"from","to","polarity","reasoning"?}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMap {
    pub variables: Vec<WireVariable>,
    pub relationships: Vec<WireRelationship>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireVariable {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRelationship {
    pub from: String,
    pub to: String,
    pub polarity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning: Option<String>,
}
