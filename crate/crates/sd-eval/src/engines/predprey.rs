//! The dummy engine: whatever it is asked, it returns the fixed 2-variable,
//! 2-relationship predator/prey model. Exists to demonstrate the engine
//! interface to anyone writing their own.

use std::time::Duration;

use async_trait::async_trait;

use sd_eval_core::graph::{CausalMap, Polarity};

use super::{Engine, EngineError, GenerateRequest, GenerateResponse, ParameterSpec};

pub struct PredPreyEngine;

impl PredPreyEngine {
    pub fn model() -> CausalMap {
        let mut map = CausalMap::new();
        map.add_relationship("predators", "prey", Polarity::Negative, None)
            .expect("static names");
        map.add_relationship("prey", "predators", Polarity::Positive, None)
            .expect("static names");
        map
    }
}

#[async_trait]
impl Engine for PredPreyEngine {
    fn name(&self) -> &str {
        "predprey"
    }

    fn parameters(&self) -> Vec<ParameterSpec> {
        Vec::new()
    }

    async fn generate(&self, _request: &GenerateRequest) -> Result<GenerateResponse, EngineError> {
        let map = Self::model();
        let raw_model_output =
            serde_json::to_string(&map.to_wire()).expect("wire form serializes");
        Ok(GenerateResponse {
            map,
            raw_model_output,
            usage: None,
            latency: Duration::ZERO,
            warnings: Vec::new(),
        })
    }
}
