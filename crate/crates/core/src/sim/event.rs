use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SimTime;

/// Payload of a scheduled event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    /// The packet at the head of the link finishes serialization.
    PacketDeparture,
    ControllerTick {
        k: u64,
    },
    /// A sender hands one segment to the bottleneck.
    PacketArrival {
        flow: u32,
    },
    FlowTimer {
        flow: u32,
        kind: FlowEvent,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowEvent {
    Start,
    /// Acknowledgement of a segment sent at `sent`; `ce` carries an ECN echo.
    Ack {
        sent: SimTime,
        ce: bool,
    },
    /// The sender learns that a segment was dropped.
    Loss,
}

impl Event {
    /// Tie-break rank at equal timestamps.
    fn priority(&self) -> u8 {
        match self {
            Event::PacketDeparture => 0,
            Event::ControllerTick { .. } => 1,
            Event::PacketArrival { .. } => 2,
            Event::FlowTimer { .. } => 3,
        }
    }
}

#[derive(Debug)]
struct Scheduled {
    time: SimTime,
    priority: u8,
    seq: u64,
    event: Event,
}

impl Scheduled {
    fn key(&self) -> (SimTime, u8, u64) {
        (self.time, self.priority, self.seq)
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // Reversed so the max-heap pops the earliest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key().cmp(&self.key())
    }
}

/// Time-ordered event heap with a total order: timestamp, then event-type
/// priority, then insertion sequence.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Scheduled>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: SimTime, event: Event) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Scheduled {
            time,
            priority: event.priority(),
            seq,
            event,
        });
    }

    pub fn pop(&mut self) -> Option<(SimTime, Event)> {
        self.heap.pop().map(|s| (s.time, s.event))
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|s| s.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
