use serde::{Deserialize, Serialize};

use super::TrafficError;
use crate::aqm::SoftTargetCurve;
use crate::Probability;

/// Left edge of the bisection bracket for the equilibrium loss probability.
pub const MIN_EQUILIBRIUM_P: f64 = 1e-9;

/// Steady-state Reno throughput in bytes/second: `(mss/rtt)·√(3/(2p))`.
pub fn reno_steady_rate(p: Probability, rtt: f64, mss: u32) -> Result<f64, TrafficError> {
    if p.value() <= 0.0 {
        return Err(TrafficError::ZeroLoss);
    }
    if !(rtt.is_finite() && rtt > 0.0) {
        return Err(TrafficError::InvalidParameter {
            name: "rtt",
            value: rtt,
        });
    }
    Ok(f64::from(mss) / rtt * (1.5 / p.value()).sqrt())
}

/// `n` identical long-running Reno flows sharing one bottleneck.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidLoad {
    pub n_flows: u32,
    pub rtt_base: f64,
    pub mss: u32,
}

impl FluidLoad {
    pub fn new(n_flows: u32, rtt_base: f64, mss: u32) -> Result<Self, TrafficError> {
        if n_flows == 0 {
            return Err(TrafficError::InvalidParameter {
                name: "n_flows",
                value: 0.0,
            });
        }
        if !(rtt_base.is_finite() && rtt_base > 0.0) {
            return Err(TrafficError::InvalidParameter {
                name: "rtt_base",
                value: rtt_base,
            });
        }
        if mss == 0 {
            return Err(TrafficError::InvalidParameter {
                name: "mss",
                value: 0.0,
            });
        }
        Ok(FluidLoad {
            n_flows,
            rtt_base,
            mss,
        })
    }

    /// Aggregate rate when every flow sees loss `p` and queue delay `q`.
    pub fn aggregate_rate(&self, p: Probability, q: f64) -> Result<f64, TrafficError> {
        Ok(f64::from(self.n_flows) * reno_steady_rate(p, self.rtt_base + q, self.mss)?)
    }
}

/// Operating point where the queue sits on its target and the flows'
/// aggregate response-function rate equals the link rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub p: Probability,
    /// Queue delay, seconds.
    pub q: f64,
}

impl Equilibrium {
    /// Congestion signals per flow per second, `p · rate / mss`.
    pub fn recovery_rate(&self, load: &FluidLoad, link_rate: f64) -> f64 {
        let per_flow = link_rate / f64::from(load.n_flows);
        self.p.value() * per_flow / f64::from(load.mss)
    }
}

/// Solves `q = q0 + q1·√p` together with `n·rate(p, rtt_base + q) = link_rate`
/// by bisection on `p ∈ [1e-9, 1]`.
pub fn solve_equilibrium(
    load: &FluidLoad,
    link_rate: f64,
    curve: &SoftTargetCurve,
) -> Result<Equilibrium, TrafficError> {
    if !(link_rate.is_finite() && link_rate > 0.0) {
        return Err(TrafficError::InvalidParameter {
            name: "link_rate",
            value: link_rate,
        });
    }
    // Decreasing in p: both the loss term and the longer RTT cut the rate.
    let residual = |p: f64| -> Result<f64, TrafficError> {
        let p = Probability::clamped(p);
        Ok(load.aggregate_rate(p, curve.target_from_p(p))? - link_rate)
    };

    let (mut lo, mut hi) = (MIN_EQUILIBRIUM_P, 1.0);
    let r_lo = residual(lo)?;
    let r_hi = residual(hi)?;
    if r_lo < 0.0 {
        return Err(TrafficError::Underloaded {
            max_rate: r_lo + link_rate,
            link_rate,
        });
    }
    if r_hi > 0.0 {
        return Err(TrafficError::Overloaded {
            min_rate: r_hi + link_rate,
            link_rate,
        });
    }
    if r_hi == 0.0 {
        lo = hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever bracket end balances the rates more closely.
    let p = if residual(lo)?.abs() <= residual(hi)?.abs() {
        lo
    } else {
        hi
    };
    let p = Probability::clamped(p);
    Ok(Equilibrium {
        p,
        q: curve.target_from_p(p),
    })
}
