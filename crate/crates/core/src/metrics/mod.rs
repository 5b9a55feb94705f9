//! Per-tick traces, run summaries and their CSV forms.

mod csv_io;
mod summary;
mod trace;

use std::path::PathBuf;

pub use csv_io::{
    read_trace, read_trace_csv, write_summary, write_summary_csv, write_trace, write_trace_csv,
    SummaryRow, SUMMARY_COLUMNS, TRACE_COLUMNS,
};
pub use summary::{nearest_rank, summarize, RunSummary, DEFAULT_WARMUP};
pub use trace::{record, TraceRecord, TraceSet};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("no trace rows at or after the {warmup} s warmup")]
    EmptyWindow { warmup: f64 },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("malformed CSV: {0}")]
    Format(csv::Error),
    #[error("trace schema mismatch: {0}")]
    Schema(String),
}
