use rand_pcg::Pcg64;

/// Stream index of the AQM's per-packet decisions. Flow `i` uses `FLOW_STREAM_BASE + i`.
pub const AQM_STREAM: u128 = 0;
pub const FLOW_STREAM_BASE: u128 = 1;

const SEED_MIX: u128 = 0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c834;

/// One PCG state per simulation; consumers get their own stream (PCG
/// increment), so adding a flow never shifts another consumer's draws.
#[derive(Clone, Copy, Debug)]
pub struct RngStreams {
    state: u128,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        RngStreams {
            state: (u128::from(seed) << 64 | u128::from(seed)) ^ SEED_MIX,
        }
    }

    pub fn stream(&self, index: u128) -> Pcg64 {
        Pcg64::new(self.state, index)
    }

    pub fn aqm(&self) -> Pcg64 {
        self.stream(AQM_STREAM)
    }

    pub fn flow(&self, flow: u32) -> Pcg64 {
        self.stream(FLOW_STREAM_BASE + u128::from(flow))
    }
}
