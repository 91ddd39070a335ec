//! Core of the causal-map evaluation harness: the graph data model, the
//! deterministic benchmark suites, the scoring and failure taxonomy, and
//! the recorded failure fixtures.

pub mod eval;
pub mod fixtures;
pub mod graph;
pub mod synthesis;
pub mod testing;

pub use eval::{
    aggregate, classify_causal, classify_conformance, percent_1dp, score_causal_translation,
    score_conformance, CausalFailureKind, ConformanceFailureKind, EvalError, EvalOutcome,
    FailureCategory, Finding, ScoreCard, Suite,
};
pub use graph::{
    diff_maps, enumerate_loops, enumerate_loops_with_cap, loop_polarity, normalize_name,
    CausalMap, FeedbackLoop, GraphError, LoopPolarity, MapDiff, MapWarning, Polarity,
    PolarityMismatch, Relationship, WireMap, WireRelationship, WireVariable, DEFAULT_LOOP_CAP,
};
pub use synthesis::{
    canonical_suites, conformance_suite, pluralize, CaseGroup, ConformanceCase,
    ConformanceCaseName, ConformanceConstraint, GroundTruthCase, SynthesisError, Vocabulary,
};
