//! Test support: random digraphs, an exhaustive cycle oracle, and ground
//! truth mutations. The oracle checks cycle-hood of every candidate node
//! sequence directly against the map, with no shared code path into the
//! real enumerator.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{loop_polarity, CausalMap, FeedbackLoop, Polarity};

pub const ORACLE_NODE_NAMES: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];

/// A digraph on up to 7 nodes with edge probability drawn from 0.3..=0.7.
pub fn random_digraph(rng: &mut ChaCha8Rng, allow_self_loops: bool) -> CausalMap {
    let n = rng.random_range(1..=7usize);
    let edge_probability: f64 = rng.random_range(0.3..=0.7);
    let mut map = CausalMap::new();
    for name in &ORACLE_NODE_NAMES[..n] {
        map.add_variable(name).unwrap();
    }
    for from in &ORACLE_NODE_NAMES[..n] {
        for to in &ORACLE_NODE_NAMES[..n] {
            if from == to && !allow_self_loops {
                continue;
            }
            if rng.random_bool(edge_probability) {
                let polarity = if rng.random_bool(0.5) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                map.add_relationship(from, to, polarity, None).unwrap();
            }
        }
    }
    map
}

/// Every simple cycle by exhaustive search: for each node subset, every
/// ordering that starts at the subset's minimum node is tested for
/// cycle-hood.
pub fn brute_force_loops(map: &CausalMap) -> Vec<FeedbackLoop> {
    let mut nodes: Vec<String> = map.variables().map(str::to_string).collect();
    nodes.sort();
    let mut found = Vec::new();

    for (i, node) in nodes.iter().enumerate() {
        if let Some(rel) = map.relationship(node, node) {
            found.push(FeedbackLoop::new(
                vec![node.clone()],
                loop_polarity(&[rel.polarity]).unwrap(),
            ));
        }
        let rest: Vec<&str> = nodes[i + 1..].iter().map(String::as_str).collect();
        let mut sequence = vec![node.as_str()];
        extend_cycles(map, &rest, &mut sequence, &mut vec![false; rest.len()], &mut found);
    }
    found.sort_by(|a, b| a.nodes().cmp(b.nodes()));
    found
}

fn extend_cycles<'a>(
    map: &CausalMap,
    pool: &[&'a str],
    sequence: &mut Vec<&'a str>,
    used: &mut Vec<bool>,
    found: &mut Vec<FeedbackLoop>,
) {
    if sequence.len() >= 2
        && map
            .relationship(sequence[sequence.len() - 1], sequence[0])
            .is_some()
    {
        let polarities: Vec<Polarity> = (0..sequence.len())
            .map(|i| {
                map.relationship(sequence[i], sequence[(i + 1) % sequence.len()])
                    .unwrap()
                    .polarity
            })
            .collect();
        found.push(FeedbackLoop::new(
            sequence.iter().map(|s| s.to_string()).collect(),
            loop_polarity(&polarities).unwrap(),
        ));
    }
    for i in 0..pool.len() {
        if used[i] {
            continue;
        }
        sequence.push(pool[i]);
        let chain_ok = map
            .relationship(sequence[sequence.len() - 2], sequence[sequence.len() - 1])
            .is_some();
        if chain_ok {
            used[i] = true;
            extend_cycles(map, pool, sequence, used, found);
            used[i] = false;
        }
        sequence.pop();
    }
}

/// The three single mutations a candidate map can suffer against a truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    DeleteRelationship,
    FlipPolarity,
    AddRelationship,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::DeleteRelationship,
        Mutation::FlipPolarity,
        Mutation::AddRelationship,
    ];

    pub fn expected_kind(self) -> crate::eval::CausalFailureKind {
        match self {
            Mutation::DeleteRelationship => crate::eval::CausalFailureKind::MissingRelationship,
            Mutation::FlipPolarity => crate::eval::CausalFailureKind::Polarity,
            Mutation::AddRelationship => crate::eval::CausalFailureKind::FakeRelationship,
        }
    }
}

/// Copy `truth` with one mutation applied. None when the map has no room
/// for it (no relationship to touch, or no free ordered pair to add).
pub fn mutate(truth: &CausalMap, mutation: Mutation, rng: &mut ChaCha8Rng) -> Option<CausalMap> {
    let rels: Vec<_> = truth.relationships().cloned().collect();
    let variables: Vec<String> = truth.variables().map(str::to_string).collect();
    let mut candidate = CausalMap::new();
    for v in &variables {
        candidate.add_variable(v).unwrap();
    }
    match mutation {
        Mutation::DeleteRelationship => {
            let victim = rels.choose(rng)?.clone();
            for rel in &rels {
                if (rel.from.as_str(), rel.to.as_str())
                    != (victim.from.as_str(), victim.to.as_str())
                {
                    candidate
                        .add_relationship(&rel.from, &rel.to, rel.polarity, None)
                        .unwrap();
                }
            }
        }
        Mutation::FlipPolarity => {
            let victim = rels.choose(rng)?.clone();
            for rel in &rels {
                let polarity = if (rel.from.as_str(), rel.to.as_str())
                    == (victim.from.as_str(), victim.to.as_str())
                {
                    rel.polarity.flipped()
                } else {
                    rel.polarity
                };
                candidate
                    .add_relationship(&rel.from, &rel.to, polarity, None)
                    .unwrap();
            }
        }
        Mutation::AddRelationship => {
            let mut open: Vec<(String, String)> = Vec::new();
            for from in &variables {
                for to in &variables {
                    if from != to && truth.relationship(from, to).is_none() {
                        open.push((from.clone(), to.clone()));
                    }
                }
            }
            let (from, to) = open.choose(rng)?.clone();
            for rel in &rels {
                candidate
                    .add_relationship(&rel.from, &rel.to, rel.polarity, None)
                    .unwrap();
            }
            let polarity = if rng.random_bool(0.5) {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            candidate.add_relationship(&from, &to, polarity, None).unwrap();
        }
    }
    Some(candidate)
}
