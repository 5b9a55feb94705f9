use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::Probability;

/// How a congestion signal is delivered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkingMode {
    #[default]
    Drop,
    /// RFC 3168 ECN: ECN-capable packets are marked with the probability that
    /// would otherwise drop them; everything else is still dropped.
    ClassicEcnMark,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Forward,
    Drop,
    Mark,
}

impl Decision {
    pub fn is_signal(self) -> bool {
        !matches!(self, Decision::Forward)
    }
}

/// Turns a signal (already decided to happen) into a drop or a mark.
pub fn signal_for(mode: MarkingMode, ecn_capable: bool) -> Decision {
    match mode {
        MarkingMode::ClassicEcnMark if ecn_capable => Decision::Mark,
        _ => Decision::Drop,
    }
}

/// Draws exactly one uniform variate from `rng` whatever `p` is, so the
/// stream position depends only on how many packets were offered.
pub fn decide<R: Rng + ?Sized>(
    p: Probability,
    mode: MarkingMode,
    ecn_capable: bool,
    rng: &mut R,
) -> Decision {
    let u: f64 = rng.random();
    if u < p.value() {
        signal_for(mode, ecn_capable)
    } else {
        Decision::Forward
    }
}
