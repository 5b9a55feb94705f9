//! CoDel with a delay target that follows the recent drop rate.
//!
//! The state machine is the usual one (first-above-time, then drops spaced
//! `interval / √count` apart). The only change is that `target` is
//! recomputed before every decision as
//! `base_target + span · drops / packets` over a trailing window.
//! With `span = 0` this is plain CoDel.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::AqmError;
use crate::Probability;

/// Outcome of running one dequeued packet through CoDel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodelDecision {
    Forward,
    Drop,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodelParams {
    /// Target with no recent drops, seconds.
    pub base_target: f64,
    /// Added to the target when every packet in the window was dropped.
    pub span: f64,
    /// Trailing window for the drop-rate estimate, seconds.
    pub window: f64,
    /// CoDel reference interval, seconds.
    pub interval: f64,
}

impl CodelParams {
    pub fn validate(&self) -> Result<(), AqmError> {
        for (name, value) in [
            ("base_target", self.base_target),
            ("window", self.window),
            ("interval", self.interval),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(AqmError::InvalidParameter { name, value });
            }
        }
        if !(self.span.is_finite() && self.span >= 0.0) {
            return Err(AqmError::InvalidParameter {
                name: "span",
                value: self.span,
            });
        }
        Ok(())
    }
}

impl Default for CodelParams {
    fn default() -> Self {
        CodelParams {
            base_target: 0.005,
            span: 0.095,
            window: 1.0,
            interval: 0.100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodelSoftState {
    params: CodelParams,
    /// (dequeue time, dropped) for every packet inside the window.
    history: VecDeque<(f64, bool)>,
    drops_in_window: u64,
    packets_in_window: u64,
    dropping: bool,
    first_above_time: Option<f64>,
    drop_next: f64,
    count: u32,
    last_count: u32,
    /// `drop_next` advances only once the packet after a drop is still above target.
    advance_pending: bool,
}

impl CodelSoftState {
    pub fn new(params: CodelParams) -> Result<Self, AqmError> {
        params.validate()?;
        Ok(CodelSoftState {
            params,
            history: VecDeque::new(),
            drops_in_window: 0,
            packets_in_window: 0,
            dropping: false,
            first_above_time: None,
            drop_next: 0.0,
            count: 0,
            last_count: 0,
            advance_pending: false,
        })
    }

    pub fn params(&self) -> &CodelParams {
        &self.params
    }

    pub fn drops_in_window(&self) -> u64 {
        self.drops_in_window
    }

    pub fn packets_in_window(&self) -> u64 {
        self.packets_in_window
    }

    pub fn dropping(&self) -> bool {
        self.dropping
    }

    pub fn drop_next(&self) -> f64 {
        self.drop_next
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    /// Fraction of windowed packets that were dropped.
    pub fn drop_rate_estimate(&self) -> Probability {
        let packets = self.packets_in_window.max(1);
        Probability::clamped(self.drops_in_window as f64 / packets as f64)
    }

    /// Current effective target, seconds.
    pub fn target(&self) -> f64 {
        self.params.base_target + self.params.span * self.drop_rate_estimate().value()
    }

    /// Drops window entries that are `window` or more seconds old.
    pub fn expire(&mut self, now: f64) {
        let horizon = now - self.params.window;
        while let Some(&(t, dropped)) = self.history.front() {
            if t > horizon {
                break;
            }
            self.history.pop_front();
            self.packets_in_window -= 1;
            if dropped {
                self.drops_in_window -= 1;
            }
        }
    }

    /// Runs one packet leaving the queue at `now` after `sojourn` seconds.
    pub fn step(&mut self, sojourn: f64, now: f64) -> CodelDecision {
        self.expire(now);
        let target = self.target();
        let ok_to_drop = self.ok_to_drop(sojourn, now, target);

        let decision = if self.dropping {
            if !ok_to_drop {
                self.dropping = false;
                self.advance_pending = false;
                CodelDecision::Forward
            } else {
                if self.advance_pending {
                    self.drop_next = self.control_law(self.drop_next);
                    self.advance_pending = false;
                }
                if now >= self.drop_next {
                    self.count = self.count.saturating_add(1);
                    self.advance_pending = true;
                    CodelDecision::Drop
                } else {
                    CodelDecision::Forward
                }
            }
        } else if ok_to_drop {
            self.dropping = true;
            let delta = self.count.saturating_sub(self.last_count);
            self.count = if delta > 1 && now - self.drop_next < 16.0 * self.params.interval {
                delta
            } else {
                1
            };
            self.last_count = self.count;
            self.drop_next = self.control_law(now);
            CodelDecision::Drop
        } else {
            CodelDecision::Forward
        };

        let dropped = decision == CodelDecision::Drop;
        self.history.push_back((now, dropped));
        self.packets_in_window += 1;
        if dropped {
            self.drops_in_window += 1;
        }
        decision
    }

    fn ok_to_drop(&mut self, sojourn: f64, now: f64, target: f64) -> bool {
        if sojourn < target {
            self.first_above_time = None;
            return false;
        }
        match self.first_above_time {
            None => {
                self.first_above_time = Some(now + self.params.interval);
                false
            }
            Some(t) => now >= t,
        }
    }

    fn control_law(&self, t: f64) -> f64 {
        t + self.params.interval / f64::from(self.count.max(1)).sqrt()
    }
}

/// Effective target of `state` in seconds.
pub fn codel_soft_target(state: &CodelSoftState) -> f64 {
    state.target()
}

/// Functional form of [`CodelSoftState::step`].
pub fn codel_step(
    mut state: CodelSoftState,
    sojourn: f64,
    now: f64,
) -> (CodelSoftState, CodelDecision) {
    let decision = state.step(sojourn, now);
    (state, decision)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(span: f64) -> CodelParams {
        CodelParams {
            base_target: 0.005,
            span,
            window: 1.0,
            interval: 0.100,
        }
    }

    fn with_counts(drops: u64, packets: u64, span: f64) -> CodelSoftState {
        let mut s = CodelSoftState::new(params(span)).unwrap();
        // Synthetic window contents; all at t = 0 so nothing expires before t = 1.
        for i in 0..packets {
            s.history.push_back((0.0, i < drops));
        }
        s.drops_in_window = drops;
        s.packets_in_window = packets;
        s
    }

    #[test]
    fn target_examples() {
        assert_eq!(codel_soft_target(&with_counts(0, 1000, 0.095)), 0.005);
        let all = codel_soft_target(&with_counts(1000, 1000, 0.095));
        assert!((all - 0.100).abs() < 1e-15);
        // 0.005 + 0.095·0.05
        let some = codel_soft_target(&with_counts(50, 1000, 0.095));
        assert!((some - 0.00975).abs() < 1e-15);
        assert_eq!(codel_soft_target(&with_counts(0, 0, 0.095)), 0.005);
    }

    #[test]
    fn quiescent_below_target() {
        let mut s = CodelSoftState::new(params(0.095)).unwrap();
        for i in 0..200 {
            let now = i as f64 * 0.001;
            assert_eq!(s.step(0.004, now), CodelDecision::Forward);
        }
        assert!(!s.dropping());
        assert_eq!(s.drops_in_window(), 0);
    }

    #[test]
    fn enters_dropping_after_an_interval_above_target() {
        let mut s = CodelSoftState::new(params(0.0)).unwrap();
        let mut first_drop = None;
        for i in 0..300 {
            let now = i as f64 * 0.001;
            if s.step(0.020, now) == CodelDecision::Drop && first_drop.is_none() {
                first_drop = Some(now);
            }
        }
        // First packet above target at t=0 arms first_above_time = 0.1.
        let t = first_drop.unwrap();
        assert!((t - 0.100).abs() < 1e-9, "first drop at {t}");
        assert!(s.dropping());
        assert!(s.count() > 1);
    }

    #[test]
    fn window_expires() {
        let mut s = CodelSoftState::new(params(0.095)).unwrap();
        s.step(0.0, 0.0);
        s.step(0.0, 0.5);
        assert_eq!(s.packets_in_window(), 2);
        s.expire(1.0);
        assert_eq!(s.packets_in_window(), 1);
        s.expire(1.5);
        assert_eq!(s.packets_in_window(), 0);
    }

    #[test]
    fn target_stays_in_range() {
        let mut s = CodelSoftState::new(params(0.095)).unwrap();
        for i in 0..5000 {
            let now = i as f64 * 0.0005;
            s.step(0.050, now);
            let t = s.target();
            assert!((0.005..=0.100 + 1e-15).contains(&t));
            assert!(s.drops_in_window() <= s.packets_in_window());
        }
    }
}
