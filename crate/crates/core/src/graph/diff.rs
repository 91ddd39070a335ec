//! Map comparison on normalized (from, to) keys.

use super::{CausalMap, Polarity, Relationship};

/// A pair present in both maps whose polarity differs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityMismatch {
    pub from: String,
    pub to: String,
    pub expected: Polarity,
    pub actual: Polarity,
}

/// Differences of a candidate map against a ground truth. A (from, to) pair
/// lands in at most one of the three sets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MapDiff {
    /// In the candidate, not in the truth.
    pub fake: Vec<Relationship>,
    /// In the truth, not in the candidate.
    pub missing: Vec<Relationship>,
    /// In both, with differing polarity (expected = truth, actual = candidate).
    pub polarity_mismatches: Vec<PolarityMismatch>,
}

impl MapDiff {
    pub fn is_empty(&self) -> bool {
        self.fake.is_empty() && self.missing.is_empty() && self.polarity_mismatches.is_empty()
    }
}

/// Compare candidate and truth. Matching is on normalized (from, to) only;
/// direction is part of identity, so a reversed edge is fake + missing.
pub fn diff_maps(candidate: &CausalMap, truth: &CausalMap) -> MapDiff {
    let mut diff = MapDiff::default();
    for rel in candidate.relationships() {
        match truth.relationship(&rel.from, &rel.to) {
            None => diff.fake.push(rel.clone()),
            Some(expected) if expected.polarity != rel.polarity => {
                diff.polarity_mismatches.push(PolarityMismatch {
                    from: rel.from.clone(),
                    to: rel.to.clone(),
                    expected: expected.polarity,
                    actual: rel.polarity,
                });
            }
            Some(_) => {}
        }
    }
    for rel in truth.relationships() {
        if candidate.relationship(&rel.from, &rel.to).is_none() {
            diff.missing.push(rel.clone());
        }
    }
    diff.fake.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    diff.missing
        .sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    diff.polarity_mismatches
        .sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    diff
}
