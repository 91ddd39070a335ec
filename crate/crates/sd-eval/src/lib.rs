//! Engines, REST service, and the CLI test harness for causal-map
//! generation and evaluation.

pub mod engines;
pub mod harness;
pub mod service;
pub mod testing;

pub use engines::{Engine, EngineRegistry, GenerateRequest, GenerateResponse};
pub use harness::{run_suite, RunConfig, RunReport};
