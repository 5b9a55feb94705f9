use std::collections::VecDeque;

use rand::Rng;

use super::SimTime;
use crate::aqm::{decide, Decision, MarkingMode};
use crate::Probability;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Packet {
    pub flow_id: u32,
    pub size: u32,
    pub enqueue_time: SimTime,
    pub ecn_capable: bool,
    /// Congestion Experienced, set when the packet is marked.
    pub ce: bool,
}

/// What happened to a packet offered to the queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnqueueOutcome {
    Forwarded,
    Marked,
    /// Dropped by the AQM.
    Dropped,
    /// Dropped because the buffer was full.
    TailDropped,
}

impl EnqueueOutcome {
    pub fn accepted(self) -> bool {
        matches!(self, EnqueueOutcome::Forwarded | EnqueueOutcome::Marked)
    }
}

/// FIFO byte queue draining at a fixed rate. The packet being serialized
/// stays at the head and counts towards the backlog until it departs.
#[derive(Clone, Debug)]
pub struct BottleneckQueue {
    fifo: VecDeque<Packet>,
    backlog: u64,
    capacity: u64,
    /// Bytes per second.
    link_rate: f64,
}

impl BottleneckQueue {
    pub fn new(link_rate: f64, capacity: u64) -> Self {
        BottleneckQueue {
            fifo: VecDeque::new(),
            backlog: 0,
            capacity,
            link_rate,
        }
    }

    pub fn backlog(&self) -> u64 {
        self.backlog
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn link_rate(&self) -> f64 {
        self.link_rate
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    pub fn head(&self) -> Option<&Packet> {
        self.fifo.front()
    }

    pub fn packets(&self) -> impl Iterator<Item = &Packet> {
        self.fifo.iter()
    }

    /// Queuing delay implied by the current backlog, seconds.
    pub fn sample_delay(&self) -> f64 {
        self.backlog as f64 / self.link_rate
    }

    /// Serialization time of `size` bytes.
    pub fn transmission_time(&self, size: u32) -> SimTime {
        SimTime::from_secs_f64(f64::from(size) / self.link_rate)
    }

    /// Applies the AQM decision and then the hard capacity limit. The
    /// decision is always drawn, even when the buffer is full.
    pub fn enqueue<R: Rng + ?Sized>(
        &mut self,
        mut pkt: Packet,
        p: Probability,
        mode: MarkingMode,
        rng: &mut R,
    ) -> EnqueueOutcome {
        let decision = decide(p, mode, pkt.ecn_capable, rng);
        if self.backlog + u64::from(pkt.size) > self.capacity {
            return EnqueueOutcome::TailDropped;
        }
        match decision {
            Decision::Drop => EnqueueOutcome::Dropped,
            Decision::Forward | Decision::Mark => {
                pkt.ce |= decision == Decision::Mark;
                self.backlog += u64::from(pkt.size);
                self.fifo.push_back(pkt);
                if pkt.ce {
                    EnqueueOutcome::Marked
                } else {
                    EnqueueOutcome::Forwarded
                }
            }
        }
    }

    pub fn pop(&mut self) -> Option<Packet> {
        let pkt = self.fifo.pop_front()?;
        self.backlog -= u64::from(pkt.size);
        Some(pkt)
    }

    /// Marks the head packet Congestion Experienced.
    pub fn mark_head(&mut self) {
        if let Some(head) = self.fifo.front_mut() {
            head.ce = true;
        }
    }
}

pub fn enqueue<R: Rng + ?Sized>(
    queue: &mut BottleneckQueue,
    pkt: Packet,
    p: Probability,
    mode: MarkingMode,
    rng: &mut R,
) -> EnqueueOutcome {
    queue.enqueue(pkt, p, mode, rng)
}

pub fn sample_delay(queue: &BottleneckQueue) -> f64 {
    queue.sample_delay()
}
