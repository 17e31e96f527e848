//! Atomic models of the MiniFab factory.

mod batcher;
mod dispatcher;
mod entities;
mod generator;
mod machine;
mod params;
mod transducer;

pub use batcher::{Batcher, BATCHER_IN, BATCHER_OUT};
pub use dispatcher::{route_port, status_port, Dispatcher, DISPATCHER_IN};
pub use entities::{Batch, FabMessage, LotType, MachineId, MachineKind, WaferLot, BATCH_SIZE};
pub use generator::{Generator, GENERATOR_OUT};
pub use machine::{done_port, Machine, MachinePhase, MACHINE_IN, MACHINE_STATUS};
pub use params::{
    ConfigError, FabParameters, GenerationPattern, GeneratorConfig, Jitter, MachineConfig,
    PhaseDurations, RepairDefaults, RepairPolicy, StepTiming, SINUSOIDAL_CYCLE,
};
pub use transducer::{vars, Transducer, TRANSDUCER_ARRIVED, TRANSDUCER_COMPLETED};
