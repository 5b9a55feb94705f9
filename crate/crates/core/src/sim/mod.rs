//! Deterministic discrete-event model of one bottleneck link.
//!
//! Time is integer nanoseconds. Events at equal timestamps run in a fixed
//! order (departure, controller tick, arrival, flow timer), then in
//! insertion order, so a run is a pure function of scenario and seed.

mod controller;
mod engine;
mod event;
mod queue;
mod rng;
mod time;

pub use controller::{Controller, TickOutput};
pub use engine::{run, FlowCounters, RunOutput, Simulation};
pub use event::{Event, EventQueue, FlowEvent};
pub use queue::{enqueue, sample_delay, BottleneckQueue, EnqueueOutcome, Packet};
pub use rng::{RngStreams, AQM_STREAM, FLOW_STREAM_BASE};
pub use time::SimTime;

use crate::aqm::AqmError;
use crate::scenario::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("scenario rejected: {0}")]
    Config(#[from] ConfigError),
    #[error("controller failure: {0}")]
    Aqm(#[from] AqmError),
}
