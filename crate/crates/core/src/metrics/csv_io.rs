use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MetricsError, RunSummary, TraceRecord, TraceSet};
use crate::traffic::Equilibrium;
use crate::Probability;

pub const TRACE_COLUMNS: [&str; 9] = [
    "time_s",
    "queue_delay_s",
    "p_prime",
    "p",
    "target_s",
    "backlog_bytes",
    "drops_cum",
    "marks_cum",
    "delivered_bytes_cum",
];

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "scenario",
    "controller",
    "n_flows",
    "seed",
    "mean_delay_s",
    "p99_delay_s",
    "mean_p",
    "drop_rate",
    "mark_rate",
    "goodput_bytes_per_s",
    "recovery_rate",
    "oracle_p",
    "oracle_delay_s",
    "error",
];

/// One line of the aggregate summary file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub controller: String,
    pub n_flows: u32,
    pub seed: u64,
    pub summary: Option<RunSummary>,
    /// Fluid-model prediction for the same load, when it exists.
    pub oracle: Option<Equilibrium>,
    pub error: Option<String>,
}

// `Display` for f64 prints the shortest string that parses back to the same bits.
fn real(v: f64) -> String {
    format!("{v}")
}

pub fn write_trace<W: Write>(records: &[TraceRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in records {
        w.write_record([
            real(r.time),
            real(r.queue_delay),
            real(r.p_prime.value()),
            real(r.p.value()),
            real(r.target),
            r.backlog.to_string(),
            r.drops_cum.to_string(),
            r.marks_cum.to_string(),
            r.delivered_bytes_cum.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for row in rows {
        let mut fields = vec![
            row.scenario.clone(),
            row.controller.clone(),
            row.n_flows.to_string(),
            row.seed.to_string(),
        ];
        match &row.summary {
            Some(s) => fields.extend([
                real(s.mean_delay),
                real(s.p99_delay),
                real(s.mean_p.value()),
                real(s.drop_rate.value()),
                real(s.mark_rate.value()),
                real(s.goodput),
                real(s.recovery_rate),
            ]),
            None => fields.extend(std::iter::repeat_n(String::new(), 7)),
        }
        match &row.oracle {
            Some(eq) => fields.extend([real(eq.p.value()), real(eq.q)]),
            None => fields.extend([String::new(), String::new()]),
        }
        fields.push(row.error.clone().unwrap_or_default());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

fn io_err(path: &Path, source: io::Error) -> MetricsError {
    MetricsError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, source: csv::Error) -> MetricsError {
    MetricsError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the per-tick trace CSV to `path`.
pub fn write_trace_csv(trace: &TraceSet, path: &Path) -> Result<(), MetricsError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_trace(&trace.records, io::BufWriter::new(file)).map_err(|e| csv_err(path, e))
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<(), MetricsError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_summary(rows, io::BufWriter::new(file)).map_err(|e| csv_err(path, e))
}

pub fn read_trace<R: io::Read>(input: R) -> Result<Vec<TraceRecord>, MetricsError> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(MetricsError::Format)?.clone();
    if headers.iter().ne(TRACE_COLUMNS) {
        return Err(MetricsError::Schema(format!(
            "expected columns {}, found {}",
            TRACE_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(MetricsError::Format)?;
        let f = |i: usize| -> Result<f64, MetricsError> {
            rec[i]
                .parse()
                .map_err(|_| bad_value(line, TRACE_COLUMNS[i], &rec[i]))
        };
        let u = |i: usize| -> Result<u64, MetricsError> {
            rec[i]
                .parse()
                .map_err(|_| bad_value(line, TRACE_COLUMNS[i], &rec[i]))
        };
        let prob = |i: usize| -> Result<Probability, MetricsError> {
            Probability::new(f(i)?).ok_or_else(|| bad_value(line, TRACE_COLUMNS[i], &rec[i]))
        };
        out.push(TraceRecord {
            time: f(0)?,
            queue_delay: f(1)?,
            p_prime: prob(2)?,
            p: prob(3)?,
            target: f(4)?,
            backlog: u(5)?,
            drops_cum: u(6)?,
            marks_cum: u(7)?,
            delivered_bytes_cum: u(8)?,
        });
    }
    Ok(out)
}

fn bad_value(line: usize, column: &str, value: &str) -> MetricsError {
    MetricsError::Schema(format!("row {}: bad `{column}` value {value:?}", line + 1))
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRecord>, MetricsError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_trace(io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(i: u64) -> TraceRecord {
        let p_prime = Probability::new(0.1 + i as f64 / 1000.0).unwrap();
        TraceRecord {
            time: 0.016 * (i + 1) as f64,
            queue_delay: 1.0 / 3.0 + i as f64,
            p_prime,
            p: p_prime.squared(),
            target: 0.005 + 0.095 * p_prime.value(),
            backlog: 1500 * i,
            drops_cum: i,
            marks_cum: 2 * i,
            delivered_bytes_cum: 1_000_000 * i,
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", TRACE_COLUMNS.join(","))
        );
    }

    #[test]
    fn column_order() {
        let mut buf = Vec::new();
        write_trace(&[sample(1)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "time_s,queue_delay_s,p_prime,p,target_s,backlog_bytes,drops_cum,marks_cum,delivered_bytes_cum"
        );
        let mut buf = Vec::new();
        write_summary(&[], &mut buf).unwrap();
        let header = String::from_utf8(buf).unwrap();
        assert!(header.starts_with("scenario,controller,n_flows,seed,mean_delay_s"));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let mut trace = TraceSet::new(1e6, 3);
        for i in 0..20 {
            trace.record(sample(i), i);
        }
        write_trace_csv(&trace, &path).unwrap();
        assert_eq!(read_trace_csv(&path).unwrap(), trace.records);
    }

    #[test]
    fn io_error_names_the_path() {
        let err = write_trace_csv(
            &TraceSet::default(),
            Path::new("/nonexistent/dir/trace.csv"),
        )
        .unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/trace.csv"));
    }

    #[test]
    fn rejects_wrong_header() {
        let err = read_trace("time_s,delay\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MetricsError::Schema(_)));
    }

    #[test]
    fn failed_run_leaves_blank_stats() {
        let row = SummaryRow {
            scenario: "s".into(),
            controller: "pi2_fixed".into(),
            n_flows: 4,
            seed: 7,
            summary: None,
            oracle: None,
            error: Some("boom".into()),
        };
        let mut buf = Vec::new();
        write_summary(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "s,pi2_fixed,4,7,,,,,,,,,,boom"
        );
    }

    proptest! {
        #[test]
        fn reals_round_trip_losslessly(
            time in 0.0f64..1e6,
            delay in 0.0f64..10.0,
            pp in 0.0f64..=1.0,
            target in 1e-6f64..1.0,
            ints in proptest::array::uniform4(0u64..u64::MAX),
        ) {
            let p_prime = Probability::new(pp).unwrap();
            let rec = TraceRecord {
                time,
                queue_delay: delay,
                p_prime,
                p: p_prime.squared(),
                target,
                backlog: ints[0],
                drops_cum: ints[1],
                marks_cum: ints[2],
                delivered_bytes_cum: ints[3],
            };
            let mut buf = Vec::new();
            write_trace(&[rec], &mut buf).unwrap();
            let back = read_trace(buf.as_slice()).unwrap();
            prop_assert_eq!(back, vec![rec]);
        }
    }
}
