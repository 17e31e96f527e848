//! Factory assembly and the benchmark scenario suite.

mod builder;
mod scenario;

pub use builder::{
    build_cascade, build_single_stage, generator_name, stage_name, stage_transducer_path,
    BuildOptions, BATCHER, CASCADE_TRANSDUCER_PATH, DIFFUSION_DISPATCHER, IMPLANTATION_DISPATCHER,
    STAGE_IN, STAGE_OUT, STAGE_RELEASES, TRANSDUCER,
};
pub use scenario::{
    enumerate_scenarios, enumerate_scenarios_with, lot_configurations, parse_lot_configurations,
    parse_pattern, scenario_seed, RepairMode, ScenarioConfig, BENCHMARK_HORIZON, BENCHMARK_ROWS,
    BENCHMARK_STAGES, DEFAULT_MASTER_SEED, PRODUCT_LOT_SET, TEST_WAFER_LOT_SET,
};

use crate::fab::{ConfigError, FabMessage};
use crate::kernel::{simulate, EventTrace, SimError, VirtualTime};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

/// Builds the cascade for `config` and simulates it to the horizon.
pub fn run_scenario(
    config: &ScenarioConfig,
    options: &BuildOptions,
) -> Result<EventTrace, BuildError> {
    let root = build_cascade(config, options)?;
    let end = VirtualTime::new(f64::from(config.horizon_minutes)).expect("positive horizon");
    Ok(simulate::<FabMessage>(root, end, config.seed)?)
}
