//! Controller math: the PI² update with a load-dependent delay target,
//! a convex RED-on-delay baseline, CoDel with the same kind of target, and
//! the per-packet drop/mark decision.

mod codel;
mod decide;
mod pi;
mod red;
mod soft_target;

pub use codel::{codel_soft_target, codel_step, CodelDecision, CodelParams, CodelSoftState};
pub use decide::{decide, signal_for, Decision, MarkingMode};
pub use pi::{pi_update, PiControllerState, PiGains};
pub use red::{convex_red_pprime, ConvexRedConfig};
pub use soft_target::{
    soft_target_from_p, soft_target_from_pprime, square_probability, SoftTargetCurve,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AqmError {
    #[error("queue delay sample is not finite: {0}")]
    NonFiniteDelay(f64),
    #[error("invalid `{name}`: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}
