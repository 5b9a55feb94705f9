use serde::{Deserialize, Serialize};

use super::{AqmError, SoftTargetCurve};
use crate::Probability;

/// PI gains and sampling period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiGains {
    /// Probability per second of delay error, applied once per update.
    pub alpha: f64,
    /// Probability per second of delay change, applied once per update.
    pub beta: f64,
    /// Sampling period in seconds.
    pub period: f64,
}

impl PiGains {
    pub fn validate(&self) -> Result<(), AqmError> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("period", self.period),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(AqmError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

impl Default for PiGains {
    fn default() -> Self {
        PiGains {
            alpha: 0.25,
            beta: 2.5,
            period: 0.016,
        }
    }
}

/// State carried by a PI² controller between sampling instants.
///
/// The delay target is evaluated from the `p′` produced by the previous
/// update, so the target never depends on the value being computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiControllerState {
    p_prime: Probability,
    q_prev: f64,
    gains: PiGains,
    curve: SoftTargetCurve,
}

impl PiControllerState {
    pub fn new(gains: PiGains, curve: SoftTargetCurve) -> Result<Self, AqmError> {
        gains.validate()?;
        Ok(PiControllerState {
            p_prime: Probability::ZERO,
            q_prev: 0.0,
            gains,
            curve,
        })
    }

    /// Starts from an arbitrary operating point. Mostly useful in tests.
    pub fn with_history(mut self, p_prime: Probability, q_prev: f64) -> Self {
        self.p_prime = p_prime;
        self.q_prev = q_prev;
        self
    }

    pub fn p_prime(&self) -> Probability {
        self.p_prime
    }

    /// Applied probability `p = p′²`.
    pub fn p(&self) -> Probability {
        self.p_prime.squared()
    }

    pub fn q_prev(&self) -> f64 {
        self.q_prev
    }

    pub fn gains(&self) -> &PiGains {
        &self.gains
    }

    pub fn curve(&self) -> &SoftTargetCurve {
        &self.curve
    }

    /// The target the next update will steer towards.
    pub fn target(&self) -> f64 {
        self.curve.target_from_pprime(self.p_prime)
    }

    /// Runs one sampling period with queue delay `q_now` (seconds) and
    /// returns the new applied probability.
    pub fn update(&mut self, q_now: f64) -> Result<Probability, AqmError> {
        if !q_now.is_finite() {
            return Err(AqmError::NonFiniteDelay(q_now));
        }
        let target = self.target();
        let raw = self.p_prime.value()
            + self.gains.alpha * (q_now - target)
            + self.gains.beta * (q_now - self.q_prev);
        self.p_prime = Probability::clamped(raw);
        self.q_prev = q_now;
        Ok(self.p())
    }
}

/// Functional form of [`PiControllerState::update`].
pub fn pi_update(
    state: PiControllerState,
    q_now: f64,
) -> Result<(PiControllerState, Probability), AqmError> {
    let mut next = state;
    let p = next.update(q_now)?;
    Ok((next, p))
}
