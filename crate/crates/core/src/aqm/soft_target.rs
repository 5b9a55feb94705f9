use serde::{Deserialize, Serialize};

use super::AqmError;
use crate::Probability;

/// Delay target that rises with the congestion level.
///
/// `q0` is the target when the controller signals nothing; `q1` is the span
/// added on top of it when the internal probability `p′` reaches 1, so the
/// largest target is `q0 + q1`. With `q1 = 0` the curve is a fixed target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftTargetCurve {
    q0: f64,
    q1: f64,
}

impl SoftTargetCurve {
    pub fn new(q0: f64, q1: f64) -> Result<Self, AqmError> {
        if !(q0.is_finite() && q0 > 0.0) {
            return Err(AqmError::InvalidParameter {
                name: "q0",
                value: q0,
            });
        }
        if !(q1.is_finite() && q1 >= 0.0) {
            return Err(AqmError::InvalidParameter {
                name: "q1",
                value: q1,
            });
        }
        Ok(SoftTargetCurve { q0, q1 })
    }

    /// A constant target of `q0` seconds.
    pub fn fixed(q0: f64) -> Result<Self, AqmError> {
        Self::new(q0, 0.0)
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn is_fixed(&self) -> bool {
        self.q1 == 0.0
    }

    /// Target in seconds as a function of the internal probability `p′`.
    #[inline]
    pub fn target_from_pprime(&self, p_prime: Probability) -> f64 {
        self.q0 + self.q1 * p_prime.value()
    }

    /// Same target expressed against the applied probability `p = p′²`.
    #[inline]
    pub fn target_from_p(&self, p: Probability) -> f64 {
        self.q0 + self.q1 * p.value().sqrt()
    }
}

/// `q0 + q1·p′`.
pub fn soft_target_from_pprime(curve: &SoftTargetCurve, p_prime: Probability) -> f64 {
    curve.target_from_pprime(p_prime)
}

/// `q0 + q1·√p`.
pub fn soft_target_from_p(curve: &SoftTargetCurve, p: Probability) -> f64 {
    curve.target_from_p(p)
}

/// `p′²`, the PI² output stage.
pub fn square_probability(p_prime: Probability) -> Probability {
    p_prime.squared()
}
