use serde::{Deserialize, Serialize};

/// Congestion window state of one Reno-style bulk sender.
///
/// Windows are in segments. A drop and a classic-ECN mark are the same
/// congestion signal here; at most one halving happens per round trip.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub cwnd: f64,
    pub ssthresh: f64,
    /// Two-way propagation delay, seconds.
    pub rtt_base: f64,
    pub mss: u32,
    pub in_recovery: bool,
    pub ecn_capable: bool,
    /// Latest RTT sample, seconds. Sets the length of a recovery episode.
    pub rtt_sample: f64,
    recovery_until: f64,
}

pub const INITIAL_CWND: f64 = 2.0;

impl FlowState {
    pub fn new(rtt_base: f64, mss: u32, ecn_capable: bool) -> Self {
        FlowState {
            cwnd: INITIAL_CWND,
            ssthresh: f64::INFINITY,
            rtt_base,
            mss,
            in_recovery: false,
            ecn_capable,
            rtt_sample: rtt_base,
            recovery_until: f64::NEG_INFINITY,
        }
    }

    pub fn with_window(mut self, cwnd: f64, ssthresh: f64) -> Self {
        self.cwnd = cwnd.max(1.0);
        self.ssthresh = ssthresh;
        self
    }

    /// Whole segments the sender may have outstanding.
    pub fn window_segments(&self) -> u64 {
        self.cwnd.floor() as u64
    }

    /// Grows the window for `acked_bytes` of new data. The window is held
    /// while in recovery; call [`FlowState::refresh`] first so the recovery
    /// flag is current.
    pub fn on_ack(&mut self, acked_bytes: u32) {
        if self.in_recovery {
            return;
        }
        let segments = f64::from(acked_bytes) / f64::from(self.mss);
        if self.cwnd < self.ssthresh {
            self.cwnd += segments;
        } else {
            self.cwnd += segments / self.cwnd;
        }
    }

    /// Reacts to a drop or mark observed at `now` (seconds). Returns whether
    /// the window was reduced.
    pub fn on_congestion(&mut self, now: f64) -> bool {
        self.refresh(now);
        if self.in_recovery {
            return false;
        }
        self.cwnd = (self.cwnd / 2.0).max(1.0);
        self.ssthresh = self.cwnd;
        self.in_recovery = true;
        self.recovery_until = now + self.rtt_sample;
        true
    }

    /// Leaves recovery once a round trip has passed.
    pub fn refresh(&mut self, now: f64) {
        if self.in_recovery && now >= self.recovery_until {
            self.in_recovery = false;
        }
    }
}

pub fn flow_on_ack(mut flow: FlowState, acked_bytes: u32) -> FlowState {
    flow.on_ack(acked_bytes);
    flow
}

pub fn flow_on_congestion(mut flow: FlowState, now: f64) -> FlowState {
    flow.on_congestion(now);
    flow
}
