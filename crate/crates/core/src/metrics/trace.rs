use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Probability;

/// One row per controller tick.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub queue_delay: f64,
    pub p_prime: Probability,
    pub p: Probability,
    pub target: f64,
    pub backlog: u64,
    pub drops_cum: u64,
    pub marks_cum: u64,
    pub delivered_bytes_cum: u64,
}

/// Everything a run records: the per-tick trace plus the few run-level
/// quantities needed to turn it into rates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceSet {
    pub records: Vec<TraceRecord>,
    /// Packets offered to the bottleneck up to each record, parallel to `records`.
    pub offered_cum: Vec<u64>,
    /// Bytes per second.
    pub link_rate: f64,
    pub n_flows: u32,
}

impl TraceSet {
    pub fn new(link_rate: f64, n_flows: u32) -> Self {
        TraceSet {
            records: Vec::new(),
            offered_cum: Vec::new(),
            link_rate,
            n_flows,
        }
    }

    pub fn record(&mut self, row: TraceRecord, offered_cum: u64) {
        debug_assert!(self.records.last().is_none_or(|last| {
            last.drops_cum <= row.drops_cum
                && last.marks_cum <= row.marks_cum
                && last.delivered_bytes_cum <= row.delivered_bytes_cum
        }));
        self.records.push(row);
        self.offered_cum.push(offered_cum);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// SHA-256 over the exact bit patterns of every recorded value.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.link_rate.to_bits().to_le_bytes());
        h.update(self.n_flows.to_le_bytes());
        for (r, offered) in self.records.iter().zip(&self.offered_cum) {
            for v in [
                r.time,
                r.queue_delay,
                r.p_prime.value(),
                r.p.value(),
                r.target,
            ] {
                h.update(v.to_bits().to_le_bytes());
            }
            for v in [
                r.backlog,
                r.drops_cum,
                r.marks_cum,
                r.delivered_bytes_cum,
                *offered,
            ] {
                h.update(v.to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Appends one tick's observables.
pub fn record(trace: &mut TraceSet, row: TraceRecord, offered_cum: u64) {
    trace.record(row, offered_cum);
}
