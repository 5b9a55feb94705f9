use serde::{Deserialize, Serialize};

use super::AqmError;
use crate::Probability;

/// Power-law drop curve on instantaneous queue delay.
///
/// A stand-in for a convex RED-on-delay baseline; `exponent = 1` is linear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexRedConfig {
    /// Delay in seconds at which the curve saturates at 1.
    pub q_max: f64,
    pub exponent: f64,
}

impl ConvexRedConfig {
    pub fn new(q_max: f64, exponent: f64) -> Result<Self, AqmError> {
        if !(q_max.is_finite() && q_max > 0.0) {
            return Err(AqmError::InvalidParameter {
                name: "q_max",
                value: q_max,
            });
        }
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(AqmError::InvalidParameter {
                name: "exponent",
                value: exponent,
            });
        }
        Ok(ConvexRedConfig { q_max, exponent })
    }

    pub fn probability(&self, q_now: f64) -> Probability {
        convex_red_pprime(self, q_now)
    }
}

pub fn convex_red_pprime(cfg: &ConvexRedConfig, q_now: f64) -> Probability {
    let x = q_now.max(0.0) / cfg.q_max;
    if x >= 1.0 {
        return Probability::ONE;
    }
    Probability::clamped(x.powf(cfg.exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_examples() {
        let cfg = ConvexRedConfig::new(0.100, 2.0).unwrap();
        assert_eq!(convex_red_pprime(&cfg, 0.0), Probability::ZERO);
        assert_eq!(convex_red_pprime(&cfg, 0.100), Probability::ONE);
        assert!((convex_red_pprime(&cfg, 0.050).value() - 0.25).abs() < 1e-15);
        assert_eq!(convex_red_pprime(&cfg, 5.0), Probability::ONE);
    }

    #[test]
    fn linear_when_exponent_is_one() {
        let cfg = ConvexRedConfig::new(0.200, 1.0).unwrap();
        assert!((cfg.probability(0.050).value() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_concave_or_degenerate() {
        assert!(ConvexRedConfig::new(0.1, 0.5).is_err());
        assert!(ConvexRedConfig::new(0.0, 2.0).is_err());
    }
}
