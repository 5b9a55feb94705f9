use rand::RngExt;
use rand_pcg::Pcg64;

use super::event::{Event, EventQueue, FlowEvent};
use super::queue::{BottleneckQueue, EnqueueOutcome, Packet};
use super::{Controller, RngStreams, SimError, SimTime};
use crate::aqm::{CodelDecision, MarkingMode};
use crate::metrics::{TraceRecord, TraceSet};
use crate::scenario::ScenarioConfig;
use crate::traffic::FlowState;

/// Per-flow packet accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlowCounters {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub marked: u64,
    pub in_queue: u64,
}

impl FlowCounters {
    pub fn conserved(&self) -> bool {
        self.generated == self.delivered + self.dropped + self.in_queue
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: TraceSet,
    pub flows: Vec<FlowCounters>,
    pub totals: FlowCounters,
    /// Of `totals.dropped`, how many were forced by the buffer limit.
    pub tail_drops: u64,
    pub controller_updates: u64,
    /// Final congestion windows, segments.
    pub final_cwnd: Vec<f64>,
}

impl RunOutput {
    pub fn conserved(&self) -> bool {
        let sum = self
            .flows
            .iter()
            .fold(FlowCounters::default(), |mut acc, f| {
                acc.generated += f.generated;
                acc.delivered += f.delivered;
                acc.dropped += f.dropped;
                acc.marked += f.marked;
                acc.in_queue += f.in_queue;
                acc
            });
        self.totals.conserved()
            && self.flows.iter().all(FlowCounters::conserved)
            && sum == self.totals
    }
}

struct Flow {
    state: FlowState,
    inflight: u64,
    active: bool,
    counters: FlowCounters,
}

/// One bottleneck, its AQM, and `n` Reno senders.
///
/// Senders sit at the bottleneck's ingress; a departed segment reaches the
/// receiver after `rtt_base/2` and its ACK returns after another
/// `rtt_base/2`. A dropped segment is reported to its sender when the ACK
/// of the segment behind it would have arrived.
pub struct Simulation {
    cfg: ScenarioConfig,
    now: SimTime,
    end: SimTime,
    period: SimTime,
    rtt_base: SimTime,
    events: EventQueue,
    queue: BottleneckQueue,
    controller: Controller,
    aqm_rng: Pcg64,
    flows: Vec<Flow>,
    link_busy: bool,
    trace: TraceSet,
    offered: u64,
    drops: u64,
    marks: u64,
    tail_drops: u64,
    delivered_bytes: u64,
    updates: u64,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<Self, SimError> {
        cfg.validate()?;
        let streams = RngStreams::new(seed);
        let link_rate = cfg.link_rate_bytes();
        let period = SimTime::from_secs_f64(cfg.aqm.period);
        let rtt_base = SimTime::from_secs_f64(cfg.rtt_base);
        let mut events = EventQueue::new();

        let mut flows = Vec::with_capacity(cfg.n_flows as usize);
        for i in 0..cfg.n_flows {
            // Staggered starts over one base RTT, drawn from the flow's own stream.
            let mut rng = streams.flow(i);
            let offset: f64 = rng.random::<f64>() * cfg.rtt_base;
            events.schedule(
                SimTime::from_secs_f64(offset),
                Event::FlowTimer {
                    flow: i,
                    kind: FlowEvent::Start,
                },
            );
            flows.push(Flow {
                state: FlowState::new(cfg.rtt_base, cfg.mss, cfg.ecn_capable),
                inflight: 0,
                active: false,
                counters: FlowCounters::default(),
            });
        }
        events.schedule(period, Event::ControllerTick { k: 1 });

        Ok(Simulation {
            cfg: cfg.clone(),
            now: SimTime::ZERO,
            end: SimTime::from_secs_f64(cfg.duration),
            period,
            rtt_base,
            events,
            queue: BottleneckQueue::new(link_rate, cfg.effective_capacity()),
            controller: Controller::from_config(cfg)?,
            aqm_rng: streams.aqm(),
            flows,
            link_busy: false,
            trace: TraceSet::new(link_rate, cfg.n_flows),
            offered: 0,
            drops: 0,
            marks: 0,
            tail_drops: 0,
            delivered_bytes: 0,
            updates: 0,
        })
    }

    /// Number of controller ticks a full run performs.
    pub fn expected_ticks(&self) -> u64 {
        self.end.as_nanos() / self.period.as_nanos()
    }

    pub fn run(mut self) -> Result<RunOutput, SimError> {
        while let Some(t) = self.events.peek_time() {
            if t > self.end {
                break;
            }
            let (t, event) = self.events.pop().expect("peeked");
            debug_assert!(t >= self.now);
            self.now = t;
            match event {
                Event::PacketDeparture => self.on_departure(),
                Event::ControllerTick { k } => self.on_tick(k)?,
                Event::PacketArrival { flow } => self.on_arrival(flow),
                Event::FlowTimer { flow, kind } => self.on_flow_timer(flow, kind),
            }
        }
        Ok(self.finish())
    }

    fn finish(mut self) -> RunOutput {
        for pkt in self.queue.packets() {
            self.flows[pkt.flow_id as usize].counters.in_queue += 1;
        }
        let totals = FlowCounters {
            generated: self.offered,
            delivered: self.flows.iter().map(|f| f.counters.delivered).sum(),
            dropped: self.drops,
            marked: self.marks,
            in_queue: self.queue.len() as u64,
        };
        RunOutput {
            trace: self.trace,
            totals,
            final_cwnd: self.flows.iter().map(|f| f.state.cwnd).collect(),
            flows: self.flows.into_iter().map(|f| f.counters).collect(),
            tail_drops: self.tail_drops,
            controller_updates: self.updates,
        }
    }

    fn on_tick(&mut self, k: u64) -> Result<(), SimError> {
        let q = self.queue.sample_delay();
        let out = self.controller.on_tick(q, self.now.as_secs_f64())?;
        self.updates += 1;
        self.trace.record(
            TraceRecord {
                time: self.now.as_secs_f64(),
                queue_delay: q,
                p_prime: out.p_prime,
                p: out.p,
                target: out.target,
                backlog: self.queue.backlog(),
                drops_cum: self.drops,
                marks_cum: self.marks,
                delivered_bytes_cum: self.delivered_bytes,
            },
            self.offered,
        );
        let next = SimTime::from_nanos((k + 1) * self.period.as_nanos());
        self.events
            .schedule(next, Event::ControllerTick { k: k + 1 });
        Ok(())
    }

    fn on_arrival(&mut self, flow: u32) {
        self.offered += 1;
        let f = &mut self.flows[flow as usize];
        f.counters.generated += 1;
        let pkt = Packet {
            flow_id: flow,
            size: self.cfg.mss,
            enqueue_time: self.now,
            ecn_capable: f.state.ecn_capable,
            ce: false,
        };
        let p = self
            .controller
            .enqueue_probability(self.queue.sample_delay());
        let outcome = self
            .queue
            .enqueue(pkt, p, self.cfg.marking, &mut self.aqm_rng);
        match outcome {
            EnqueueOutcome::Forwarded => self.start_service(),
            EnqueueOutcome::Marked => {
                self.marks += 1;
                self.flows[flow as usize].counters.marked += 1;
                self.start_service();
            }
            EnqueueOutcome::Dropped | EnqueueOutcome::TailDropped => {
                if outcome == EnqueueOutcome::TailDropped {
                    self.tail_drops += 1;
                }
                let wait = SimTime::from_secs_f64(self.queue.sample_delay());
                self.drop_packet(flow, wait);
            }
        }
    }

    fn drop_packet(&mut self, flow: u32, wait: SimTime) {
        self.drops += 1;
        self.flows[flow as usize].counters.dropped += 1;
        self.events.schedule(
            self.now + wait + self.rtt_base,
            Event::FlowTimer {
                flow,
                kind: FlowEvent::Loss,
            },
        );
    }

    /// Puts the head packet on the wire if the link is idle, running
    /// dequeue-time AQM decisions first.
    fn start_service(&mut self) {
        if self.link_busy {
            return;
        }
        while let Some(head) = self.queue.head().copied() {
            if self.controller.acts_on_dequeue() {
                let sojourn = (self.now - head.enqueue_time).as_secs_f64();
                if self.controller.on_dequeue(sojourn, self.now.as_secs_f64())
                    == CodelDecision::Drop
                {
                    if self.cfg.marking == MarkingMode::ClassicEcnMark && head.ecn_capable {
                        if !head.ce {
                            self.queue.mark_head();
                            self.marks += 1;
                            self.flows[head.flow_id as usize].counters.marked += 1;
                        }
                    } else {
                        self.queue.pop();
                        self.drop_packet(head.flow_id, SimTime::ZERO);
                        continue;
                    }
                }
            }
            self.link_busy = true;
            let done = self.now + self.queue.transmission_time(head.size);
            self.events.schedule(done, Event::PacketDeparture);
            return;
        }
    }

    fn on_departure(&mut self) {
        let pkt = self.queue.pop().expect("departure with empty queue");
        self.link_busy = false;
        self.delivered_bytes += u64::from(pkt.size);
        self.flows[pkt.flow_id as usize].counters.delivered += 1;
        self.events.schedule(
            self.now + self.rtt_base,
            Event::FlowTimer {
                flow: pkt.flow_id,
                kind: FlowEvent::Ack {
                    sent: pkt.enqueue_time,
                    ce: pkt.ce,
                },
            },
        );
        self.start_service();
    }

    fn on_flow_timer(&mut self, flow: u32, kind: FlowEvent) {
        let now = self.now.as_secs_f64();
        let f = &mut self.flows[flow as usize];
        match kind {
            FlowEvent::Start => f.active = true,
            FlowEvent::Ack { sent, ce } => {
                f.inflight -= 1;
                f.state.rtt_sample = (self.now - sent).as_secs_f64();
                if ce {
                    f.state.on_congestion(now);
                } else {
                    f.state.refresh(now);
                    f.state.on_ack(self.cfg.mss);
                }
            }
            FlowEvent::Loss => {
                f.inflight -= 1;
                f.state.on_congestion(now);
            }
        }
        self.send(flow);
    }

    /// Fills the congestion window.
    fn send(&mut self, flow: u32) {
        let f = &mut self.flows[flow as usize];
        if !f.active {
            return;
        }
        let window = f.state.window_segments().max(1);
        while f.inflight < window {
            f.inflight += 1;
            self.events
                .schedule(self.now, Event::PacketArrival { flow });
        }
    }
}

/// Runs `cfg` to completion with `seed`.
pub fn run(cfg: &ScenarioConfig, seed: u64) -> Result<RunOutput, SimError> {
    Simulation::new(cfg, seed)?.run()
}
