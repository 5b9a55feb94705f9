//! TCP-like load: packet-level Reno window dynamics and the fluid
//! square-root-law model used as an analytic cross-check.

mod fluid;
mod reno;

pub use fluid::{reno_steady_rate, solve_equilibrium, Equilibrium, FluidLoad, MIN_EQUILIBRIUM_P};
pub use reno::{flow_on_ack, flow_on_congestion, FlowState, INITIAL_CWND};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrafficError {
    #[error("steady-state rate is unbounded at zero loss")]
    ZeroLoss,
    #[error("invalid `{name}`: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("load infeasible: flows reach at most {max_rate:.1} B/s at minimum loss, below link rate {link_rate:.1} B/s")]
    Underloaded { max_rate: f64, link_rate: f64 },
    #[error("load infeasible: flows still send {min_rate:.1} B/s at p = 1, above link rate {link_rate:.1} B/s")]
    Overloaded { min_rate: f64, link_rate: f64 },
}
