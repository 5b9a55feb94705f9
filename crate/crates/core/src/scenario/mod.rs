//! Scenario files, parameter sweeps and the target-curve table.

mod config;
mod curve;
mod sweep;

use std::path::PathBuf;

pub use config::{
    parse_scenario, AqmParams, ControllerKind, ScenarioConfig, DEFAULT_MSS, DEFAULT_NAME,
    DEFAULT_SEED,
};
pub use curve::{print_target_curve, target_curve, write_curve, CurveRow, CURVE_COLUMNS};
pub use sweep::{
    derive_seed, oracle_for, run_point, run_sweep, trace_dir, RunFailure, SweepError, SweepRecord,
    SweepRun, SweepSpec, SEED_STRIDE,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("TOML syntax: {0}")]
    Syntax(String),
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("`{key}` must be a {expected}")]
    WrongType { key: String, expected: &'static str },
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown key `{key}`{}", suggestion.as_ref().map(|s| format!(", did you mean `{s}`?")).unwrap_or_default())]
    UnknownKey {
        key: String,
        suggestion: Option<String>,
    },
}
