//! Canonical suite construction.
//!
//! Topologies are data: each test names the vocabulary slots its cycle(s)
//! run through and where the negative edge sits, which pins the generated
//! ground truths independently of any RNG. The seed only drives the order
//! in which a description's sentences are strung together.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::graph::{CausalMap, LoopPolarity, Polarity};

use super::sentence::{render_sentence, CausalSentenceSpec, Direction};
use super::vocabulary::Vocabulary;
use super::{
    CaseGroup, ConformanceCase, ConformanceCaseName, ConformanceConstraint, GroundTruthCase,
    SynthesisError,
};

pub const CAUSAL_SUITE_SIZE: usize = 24;
pub const CONFORMANCE_SUITE_SIZE: usize = 18;

/// A planned simple cycle: vocabulary slots in cycle order, plus the edge
/// (by position in that order) carrying the negative polarity, if any.
#[derive(Clone, Copy)]
struct CyclePlan<'a> {
    nodes: &'a [usize],
    negative_edge: Option<usize>,
}

/// Single-loop tests per length: the slots the cycle runs through and the
/// negative-edge position used by the balancing variant.
const SINGLE_LOOP_LAYOUTS: &[(&[usize], usize)] = &[
    (&[2, 3], 0),                        // balack -> whoziewhat
    (&[4, 5, 3], 2),                     // funkado -> maxabizer -> whoziewhat
    (&[4, 5, 6, 7], 0),                  // funkado -> ... -> reflupper
    (&[8, 9, 5, 6, 7], 2),               // exeminte -> oc -> maxabizer ...
    (&[8, 9, 10, 11, 6, 7], 4),          // exeminte -> ... -> reflupper
    (&[8, 9, 10, 11, 12, 13, 7], 6),     // exeminte -> ... -> poval -> reflupper
    (&[14, 15, 8, 9, 10, 11, 12, 13], 2), // auspong -> dominitoxing -> ...
];

struct MultiLoopPlan {
    title: &'static str,
    loops: &'static [CyclePlan<'static>],
}

/// The six multi-loop tests: two 2-loop cases (lengths 3 and 6), two 3-loop
/// cases (5, 2, 4), two 5-loop cases (3, 5, 6, 2, 6). Loops overlap by
/// sharing one variable with the next.
const MULTI_LOOP_PLANS: &[MultiLoopPlan] = &[
    MultiLoopPlan {
        title: "extract 2 feedback loops with [+ , +] polarities",
        loops: &[
            CyclePlan { nodes: &[2, 0, 1], negative_edge: None },
            CyclePlan { nodes: &[2, 3, 4, 5, 6, 7], negative_edge: None },
        ],
    },
    MultiLoopPlan {
        title: "extract 2 feedback loops with [-, +] polarities",
        loops: &[
            CyclePlan { nodes: &[2, 0, 1], negative_edge: Some(1) },
            CyclePlan { nodes: &[2, 3, 4, 5, 6, 7], negative_edge: None },
        ],
    },
    MultiLoopPlan {
        title: "extract 3 feedback loops with [-, -, +] polarities",
        loops: &[
            CyclePlan { nodes: &[4, 0, 1, 2, 3], negative_edge: Some(1) },
            CyclePlan { nodes: &[4, 5], negative_edge: Some(0) },
            CyclePlan { nodes: &[5, 6, 7, 8], negative_edge: None },
        ],
    },
    MultiLoopPlan {
        title: "extract 3 feedback loops with [+ , + , -] polarities",
        loops: &[
            CyclePlan { nodes: &[4, 0, 1, 2, 3], negative_edge: None },
            CyclePlan { nodes: &[4, 5], negative_edge: None },
            CyclePlan { nodes: &[5, 6, 7, 8], negative_edge: Some(0) },
        ],
    },
    MultiLoopPlan {
        title: "extract 5 feedback loops with [-, +, +, -, -] polarities",
        loops: &[
            CyclePlan { nodes: &[2, 0, 1], negative_edge: Some(1) },
            CyclePlan { nodes: &[2, 3, 4, 5, 6], negative_edge: None },
            CyclePlan { nodes: &[6, 7, 8, 9, 10, 11], negative_edge: None },
            CyclePlan { nodes: &[11, 12], negative_edge: Some(0) },
            CyclePlan { nodes: &[12, 13, 14, 15, 16, 17], negative_edge: Some(0) },
        ],
    },
    MultiLoopPlan {
        title: "extract 5 feedback loops with [-, +, +, +, -] polarities",
        loops: &[
            CyclePlan { nodes: &[2, 0, 1], negative_edge: Some(1) },
            CyclePlan { nodes: &[2, 3, 4, 5, 6], negative_edge: None },
            CyclePlan { nodes: &[6, 7, 8, 9, 10, 11], negative_edge: None },
            CyclePlan { nodes: &[11, 12], negative_edge: None },
            CyclePlan { nodes: &[12, 13, 14, 15, 16, 17], negative_edge: Some(0) },
        ],
    },
];

/// Stable per-case seed derivation (splitmix-style), so one case can be
/// regenerated without the rest of the suite.
fn mix_seed(seed: u64, ordinal: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(ordinal.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sentences for one planned cycle, in narration order: the walk starts at
/// the lexicographically smallest variable and directions alternate up/down
/// from there.
fn cycle_sentences(plan: CyclePlan<'_>, vocab: &Vocabulary) -> Vec<CausalSentenceSpec> {
    let len = plan.nodes.len();
    let start = (0..len)
        .min_by_key(|&i| vocab.variable(plan.nodes[i]))
        .expect("cycle is non-empty");
    (0..len)
        .map(|step| {
            let edge = (start + step) % len;
            let polarity = if plan.negative_edge == Some(edge) {
                Polarity::Negative
            } else {
                Polarity::Positive
            };
            CausalSentenceSpec {
                from: vocab.noun(plan.nodes[edge]).to_string(),
                to: vocab.noun(plan.nodes[(edge + 1) % len]).to_string(),
                polarity,
                direction: Direction::alternating_from_up(step),
            }
        })
        .collect()
}

fn truth_from_sentences(specs: &[CausalSentenceSpec]) -> Result<CausalMap, SynthesisError> {
    let mut truth = CausalMap::new();
    for spec in specs {
        if spec.from == spec.to {
            return Err(SynthesisError::SelfReference {
                noun: spec.from.clone(),
            });
        }
        truth.add_relationship(
            &super::pluralize(&spec.from)?,
            &super::pluralize(&spec.to)?,
            spec.polarity,
            None,
        )?;
    }
    Ok(truth)
}

/// Render one sentence per relationship and string them together in a
/// seeded-shuffle order, joined by single spaces.
pub fn assemble_description(
    specs: &[CausalSentenceSpec],
    seed: u64,
) -> Result<String, SynthesisError> {
    let mut order: Vec<usize> = (0..specs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let sentences: Vec<String> = order
        .into_iter()
        .map(|i| render_sentence(&specs[i]))
        .collect::<Result<_, _>>()?;
    Ok(sentences.join(" "))
}

fn make_case(
    id: String,
    group: CaseGroup,
    title: String,
    specs: Vec<CausalSentenceSpec>,
    case_seed: u64,
) -> Result<GroundTruthCase, SynthesisError> {
    let truth = truth_from_sentences(&specs)?;
    let description = assemble_description(&specs, case_seed)?;
    Ok(GroundTruthCase {
        id,
        group,
        title,
        description,
        truth,
        seed: case_seed,
    })
}

fn sign_word(polarity: LoopPolarity) -> &'static str {
    match polarity {
        LoopPolarity::Reinforcing => "reinforcing",
        LoopPolarity::Balancing => "balancing",
    }
}

/// The four single-relationship tests: the full polarity x direction grid
/// over the first two vocabulary nouns.
pub fn build_single_relationship_tests(
    vocab: &Vocabulary,
    seed: u64,
) -> Result<Vec<GroundTruthCase>, SynthesisError> {
    let grid = [
        (Polarity::Positive, Direction::Up, "reinforcing", "up"),
        (Polarity::Positive, Direction::Down, "reinforcing", "down"),
        (Polarity::Negative, Direction::Up, "balancing", "up"),
        (Polarity::Negative, Direction::Down, "balancing", "down"),
    ];
    grid.iter()
        .enumerate()
        .map(|(i, (polarity, direction, sign, dir))| {
            let specs = vec![CausalSentenceSpec {
                from: vocab.noun(0).to_string(),
                to: vocab.noun(1).to_string(),
                polarity: *polarity,
                direction: *direction,
            }];
            make_case(
                format!("ct{:02}", i + 1),
                CaseGroup::SingleRelationship,
                format!("extract a {sign} relationship {dir}"),
                specs,
                mix_seed(seed, i as u64),
            )
        })
        .collect()
}

fn single_loop_plan(length: usize, sign: LoopPolarity) -> Option<CyclePlan<'static>> {
    let (nodes, negative_edge) = SINGLE_LOOP_LAYOUTS.get(length.checked_sub(2)?)?;
    Some(CyclePlan {
        nodes,
        negative_edge: match sign {
            LoopPolarity::Reinforcing => None,
            LoopPolarity::Balancing => Some(*negative_edge),
        },
    })
}

/// A single simple cycle of `length` distinct variables: all edges positive
/// for a reinforcing loop, exactly one negative for a balancing one.
pub fn build_loop(
    length: usize,
    sign: LoopPolarity,
    vocab: &Vocabulary,
    _seed: u64,
) -> Result<CausalMap, SynthesisError> {
    if length < 2 {
        return Err(SynthesisError::InvalidLoopLength { length });
    }
    if length > vocab.len() {
        return Err(SynthesisError::LoopTooLong {
            length,
            vocabulary: vocab.len(),
        });
    }
    let fallback: Vec<usize>;
    let plan = match single_loop_plan(length, sign) {
        Some(plan) => plan,
        None => {
            fallback = (0..length).collect();
            CyclePlan {
                nodes: &fallback,
                negative_edge: match sign {
                    LoopPolarity::Reinforcing => None,
                    LoopPolarity::Balancing => Some(0),
                },
            }
        }
    };
    truth_from_sentences(&cycle_sentences(plan, vocab))
}

/// 14 single-loop tests: lengths 2 through 8 for each loop polarity.
pub fn build_single_loop_tests(
    vocab: &Vocabulary,
    seed: u64,
) -> Result<Vec<GroundTruthCase>, SynthesisError> {
    let mut cases = Vec::with_capacity(14);
    let mut ordinal = 4u64;
    for sign in [LoopPolarity::Reinforcing, LoopPolarity::Balancing] {
        for length in 2..=8usize {
            let plan = single_loop_plan(length, sign).expect("layouts cover lengths 2..=8");
            cases.push(make_case(
                format!("ct{:02}", ordinal + 1),
                CaseGroup::SingleLoop,
                format!(
                    "extract a {} feedback loop with {} variables",
                    sign_word(sign),
                    length
                ),
                cycle_sentences(plan, vocab),
                mix_seed(seed, ordinal),
            )?);
            ordinal += 1;
        }
    }
    Ok(cases)
}

/// 6 multi-loop tests over overlapping cycles.
pub fn build_multi_loop_tests(
    vocab: &Vocabulary,
    seed: u64,
) -> Result<Vec<GroundTruthCase>, SynthesisError> {
    MULTI_LOOP_PLANS
        .iter()
        .enumerate()
        .map(|(i, plan)| {
            let ordinal = 18 + i as u64;
            let specs: Vec<CausalSentenceSpec> = plan
                .loops
                .iter()
                .flat_map(|cycle| cycle_sentences(*cycle, vocab))
                .collect();
            make_case(
                format!("ct{:02}", ordinal + 1),
                CaseGroup::MultipleLoops,
                plan.title.to_string(),
                specs,
                mix_seed(seed, ordinal),
            )
        })
        .collect()
}

/// All 24 causal-translation tests: 4 single-relationship, 14 single-loop,
/// 6 multi-loop.
pub fn causal_suite(
    vocab: &Vocabulary,
    seed: u64,
) -> Result<Vec<GroundTruthCase>, SynthesisError> {
    let mut cases = build_single_relationship_tests(vocab, seed)?;
    cases.extend(build_single_loop_tests(vocab, seed)?);
    cases.extend(build_multi_loop_tests(vocab, seed)?);
    debug_assert_eq!(cases.len(), CAUSAL_SUITE_SIZE);
    Ok(cases)
}

struct InstructionPlan {
    title: &'static str,
    required: bool,
    min_variables: Option<usize>,
    max_variables: Option<usize>,
    min_loops: Option<usize>,
    max_loops: Option<usize>,
}

/// The nine instructions appended to each base case. Bound values are the
/// reference values; the "min number" wording on the seventh is deliberate.
const INSTRUCTION_PLANS: &[InstructionPlan] = &[
    InstructionPlan { title: "include specific variables", required: true, min_variables: None, max_variables: None, min_loops: None, max_loops: None },
    InstructionPlan { title: "include a minimum number of variables", required: false, min_variables: Some(10), max_variables: None, min_loops: None, max_loops: None },
    InstructionPlan { title: "include a maximum number of variables", required: false, min_variables: None, max_variables: Some(5), min_loops: None, max_loops: None },
    InstructionPlan { title: "include a minimum number of feedback loops", required: false, min_variables: None, max_variables: None, min_loops: Some(8), max_loops: None },
    InstructionPlan { title: "include a maximum number of feedback loops", required: false, min_variables: None, max_variables: None, min_loops: None, max_loops: Some(4) },
    InstructionPlan { title: "include a minimum number of feedback loops and a minimum number of variables", required: false, min_variables: Some(8), max_variables: None, min_loops: Some(6), max_loops: None },
    InstructionPlan { title: "include a min number of feedback loops and a maximum number of variables", required: false, min_variables: None, max_variables: Some(15), min_loops: Some(6), max_loops: None },
    InstructionPlan { title: "include a maximum number of feedback loops and a maximum number of variables", required: false, min_variables: None, max_variables: Some(5), min_loops: None, max_loops: Some(4) },
    InstructionPlan { title: "include a maximum number of feedback loops and a minimum number of variables", required: false, min_variables: Some(5), max_variables: None, min_loops: None, max_loops: Some(4) },
];

/// The 18 conformance tests: 2 base cases x 9 instructions.
pub fn conformance_suite() -> Vec<ConformanceCase> {
    let mut cases = Vec::with_capacity(CONFORMANCE_SUITE_SIZE);
    let mut number = 0;
    for case_name in [
        ConformanceCaseName::AmericanRevolution,
        ConformanceCaseName::RoadRage,
    ] {
        for plan in INSTRUCTION_PLANS {
            number += 1;
            let constraint = ConformanceConstraint {
                required_variables: if plan.required {
                    case_name
                        .required_variables()
                        .iter()
                        .map(|v| v.to_string())
                        .collect()
                } else {
                    Vec::new()
                },
                min_variables: plan.min_variables,
                max_variables: plan.max_variables,
                min_loops: plan.min_loops,
                max_loops: plan.max_loops,
            };
            debug_assert!(!constraint.is_vacuous());
            cases.push(ConformanceCase {
                id: format!("cf{number:02}"),
                case_name,
                title: format!(
                    "can conform to the instruction {}| for the case {}",
                    plan.title,
                    case_name.display()
                ),
                base_prompt: case_name.base_prompt().to_string(),
                instruction: constraint.instruction(),
                constraint,
            });
        }
    }
    cases
}

/// Both canonical suites for a given seed.
pub fn canonical_suites(
    seed: u64,
) -> Result<(Vec<GroundTruthCase>, Vec<ConformanceCase>), SynthesisError> {
    let vocab = Vocabulary::builtin();
    Ok((causal_suite(&vocab, seed)?, conformance_suite()))
}

/// The suite fixture document: one JSON array covering both suites.
pub fn suite_fixture_json(
    causal: &[GroundTruthCase],
    conformance: &[ConformanceCase],
) -> serde_json::Value {
    let mut entries = Vec::new();
    for case in causal {
        entries.push(json!({
            "id": case.id,
            "group": case.group,
            "title": case.title,
            "description": case.description,
            "truth": case.truth.to_wire(),
            "seed": case.seed,
        }));
    }
    for case in conformance {
        entries.push(json!({
            "id": case.id,
            "group": "conformance",
            "title": case.title,
            "prompt": case.prompt(),
            "constraint": case.constraint,
            "seed": 0,
        }));
    }
    serde_json::Value::Array(entries)
}
