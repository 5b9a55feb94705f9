use serde::{Deserialize, Serialize};

use super::{MetricsError, TraceSet};
use crate::Probability;

pub const DEFAULT_WARMUP: f64 = 10.0;

/// Steady-state statistics of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mean_delay: f64,
    pub p99_delay: f64,
    pub mean_p: Probability,
    pub drop_rate: Probability,
    pub mark_rate: Probability,
    /// Bytes per second.
    pub goodput: f64,
    /// Congestion signals per flow per second.
    pub recovery_rate: f64,
}

/// Nearest-rank percentile of an already sorted slice, `pct` in (0, 100].
pub fn nearest_rank(sorted: &[f64], pct: u32) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len() as u64;
    let rank = (u64::from(pct) * n).div_ceil(100).max(1);
    Some(sorted[(rank - 1) as usize])
}

// Incremental form keeps a constant series exactly constant.
fn running_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut mean = 0.0;
    for (k, x) in values.enumerate() {
        mean += (x - mean) / (k + 1) as f64;
    }
    mean
}

/// Summarizes the rows with `time >= warmup`. Cumulative counters are
/// differenced against the last row before the window (or zero).
pub fn summarize(trace: &TraceSet, warmup: f64) -> Result<RunSummary, MetricsError> {
    let start = trace.records.partition_point(|r| r.time < warmup);
    let window = &trace.records[start..];
    let last = window.last().ok_or(MetricsError::EmptyWindow { warmup })?;

    let (t0, drops0, marks0, bytes0, offered0) = match start.checked_sub(1) {
        Some(i) => {
            let r = &trace.records[i];
            (
                r.time,
                r.drops_cum,
                r.marks_cum,
                r.delivered_bytes_cum,
                trace.offered_cum[i],
            )
        }
        None => (0.0, 0, 0, 0, 0),
    };
    let offered = trace.offered_cum[trace.records.len() - 1] - offered0;
    let drops = last.drops_cum - drops0;
    let marks = last.marks_cum - marks0;
    let span = last.time - t0;

    let mean_delay = running_mean(window.iter().map(|r| r.queue_delay));
    let mean_p = running_mean(window.iter().map(|r| r.p.value()));
    let mut delays: Vec<f64> = window.iter().map(|r| r.queue_delay).collect();
    delays.sort_by(f64::total_cmp);
    let p99_delay = nearest_rank(&delays, 99).unwrap_or(0.0);

    let ratio = |num: u64| {
        if offered == 0 {
            Probability::ZERO
        } else {
            Probability::clamped(num as f64 / offered as f64)
        }
    };
    let goodput = if span > 0.0 {
        (last.delivered_bytes_cum - bytes0) as f64 / span
    } else {
        0.0
    };
    let recovery_rate = if span > 0.0 && trace.n_flows > 0 {
        (drops + marks) as f64 / (f64::from(trace.n_flows) * span)
    } else {
        0.0
    };

    Ok(RunSummary {
        mean_delay,
        p99_delay,
        mean_p: Probability::clamped(mean_p),
        drop_rate: ratio(drops),
        mark_rate: ratio(marks),
        goodput,
        recovery_rate,
    })
}
