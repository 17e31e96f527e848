//! Parallel DEVS execution engine.

mod bag;
mod flatten;
mod model;
mod seed;
mod simulator;
mod time;
mod trace;

pub use bag::EventBag;
pub use flatten::flatten;
pub use model::{Atomic, Component, Context, CoupledSpec, Endpoint, ModelError, Payload};
pub use seed::{component_rng, derive_component_seed};
pub use simulator::simulate;
pub use time::VirtualTime;
pub use trace::{EventTrace, EventTraceRecord, RecordKind, TraceValue};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("construction error: {0}")]
    Construction(String),
    #[error("model error in {path} at t={time}: {message}")]
    Model {
        path: String,
        time: f64,
        message: String,
    },
}
