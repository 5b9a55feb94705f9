//! Active queue management with a load-dependent delay target.
//!
//! The [`aqm`] module holds the controllers: PI² whose delay target grows
//! with its own output, fixed-target PI and PI², a convex RED-on-delay
//! curve, and CoDel whose target follows the recent drop rate. [`sim`]
//! closes the loop with Reno-style senders over one bottleneck,
//! [`traffic`] provides the fluid square-root-law oracle, [`metrics`]
//! records and summarizes traces, and [`scenario`] parses scenario and
//! sweep files.

pub mod aqm;
pub mod metrics;
mod probability;
pub mod scenario;
pub mod sim;
pub mod traffic;

pub use aqm::{
    decide, pi_update, soft_target_from_p, soft_target_from_pprime, square_probability, Decision,
    MarkingMode, PiControllerState, PiGains, SoftTargetCurve,
};
pub use metrics::{summarize, RunSummary, TraceRecord, TraceSet};
pub use probability::Probability;
pub use scenario::{parse_scenario, run_sweep, ControllerKind, ScenarioConfig, SweepSpec};
pub use sim::{run, RunOutput};
pub use traffic::{reno_steady_rate, solve_equilibrium, Equilibrium, FluidLoad};
