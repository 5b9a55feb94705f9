use crate::aqm::{AqmError, CodelDecision, CodelSoftState, ConvexRedConfig, PiControllerState};
use crate::scenario::{ControllerKind, ScenarioConfig};
use crate::Probability;

/// Values written to the trace at a controller tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TickOutput {
    pub p_prime: Probability,
    pub p: Probability,
    pub target: f64,
}

/// The AQM installed at the bottleneck.
#[derive(Clone, Debug)]
pub enum Controller {
    /// PI on sampled queue delay. With `squared` the applied probability is
    /// `p′²` (PI²); without it `p′` is applied directly.
    Pi {
        state: PiControllerState,
        squared: bool,
    },
    /// Per-packet probability from instantaneous delay.
    ConvexRed(ConvexRedConfig),
    /// Dequeue-time decisions on per-packet sojourn.
    Codel(CodelSoftState),
    None,
}

impl Controller {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, AqmError> {
        Ok(match cfg.controller {
            ControllerKind::PiFixed | ControllerKind::Pi2Fixed | ControllerKind::CurvyPi2 => {
                Controller::Pi {
                    state: PiControllerState::new(cfg.gains(), cfg.curve())?,
                    squared: cfg.controller != ControllerKind::PiFixed,
                }
            }
            ControllerKind::ConvexRed => Controller::ConvexRed(cfg.red_config()),
            ControllerKind::CodelFixed | ControllerKind::CodelSoft => {
                Controller::Codel(CodelSoftState::new(cfg.codel_params())?)
            }
            ControllerKind::None => Controller::None,
        })
    }

    /// Whether drops happen at dequeue rather than at enqueue.
    pub fn acts_on_dequeue(&self) -> bool {
        matches!(self, Controller::Codel(_))
    }

    /// Probability applied to a packet arriving while the queue holds
    /// `q_inst` seconds of backlog.
    pub fn enqueue_probability(&self, q_inst: f64) -> Probability {
        match self {
            Controller::Pi {
                state,
                squared: true,
            } => state.p(),
            Controller::Pi {
                state,
                squared: false,
            } => state.p_prime(),
            Controller::ConvexRed(cfg) => cfg.probability(q_inst),
            Controller::Codel(_) | Controller::None => Probability::ZERO,
        }
    }

    /// Sampling-period work. The PI family updates here; the others only
    /// report their current state.
    pub fn on_tick(&mut self, q_now: f64, now: f64) -> Result<TickOutput, AqmError> {
        Ok(match self {
            Controller::Pi { state, squared } => {
                let target = state.target();
                state.update(q_now)?;
                let p_prime = state.p_prime();
                let p = if *squared { p_prime.squared() } else { p_prime };
                TickOutput { p_prime, p, target }
            }
            Controller::ConvexRed(cfg) => {
                let p = cfg.probability(q_now);
                TickOutput {
                    p_prime: p,
                    p,
                    target: cfg.q_max,
                }
            }
            Controller::Codel(state) => {
                state.expire(now);
                let p = state.drop_rate_estimate();
                TickOutput {
                    p_prime: p,
                    p,
                    target: state.target(),
                }
            }
            Controller::None => TickOutput {
                p_prime: Probability::ZERO,
                p: Probability::ZERO,
                target: 0.0,
            },
        })
    }

    pub fn on_dequeue(&mut self, sojourn: f64, now: f64) -> CodelDecision {
        match self {
            Controller::Codel(state) => state.step(sojourn, now),
            _ => CodelDecision::Forward,
        }
    }
}
