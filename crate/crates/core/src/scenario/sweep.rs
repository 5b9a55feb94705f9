use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use toml::{Table, Value};

use super::{ConfigError, ScenarioConfig};
use crate::metrics::{
    summarize, write_summary_csv, write_trace_csv, MetricsError, RunSummary, SummaryRow,
};
use crate::sim::{self, RunOutput};
use crate::traffic::{solve_equilibrium, Equilibrium, FluidLoad};

/// Seeds of consecutive axis points are this far apart.
pub const SEED_STRIDE: u64 = 1_000_000;

/// One scenario varied along one key, each point repeated with several seeds.
///
/// ```toml
/// axis = "n_flows"
/// values = [5, 10, 20, 40]
/// repeats = 5
///
/// [base]
/// name = "ladder"
/// controller = "curvy_pi2"
/// link_rate = 100e6
/// rtt_base = 0.1
/// n_flows = 10
/// duration = 60
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    base: Table,
    axis: String,
    values: Vec<Value>,
    repeats: u32,
}

/// One (axis value, repeat) cell of the grid.
#[derive(Clone, Debug)]
pub struct SweepRun {
    pub point: usize,
    pub repeat: u32,
    pub axis_value: String,
    pub config: ScenarioConfig,
    pub seed: u64,
}

/// Result of one grid cell.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub run: SweepRun,
    pub row: SummaryRow,
    /// Trace digest when the run completed.
    pub digest: Option<String>,
    pub conserved: Option<bool>,
}

impl SweepSpec {
    pub fn new(
        base: Table,
        axis: &str,
        values: Vec<Value>,
        repeats: u32,
    ) -> Result<Self, ConfigError> {
        let spec = SweepSpec {
            base,
            axis: axis.to_string(),
            values,
            repeats,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_config(
        base: &ScenarioConfig,
        axis: &str,
        values: Vec<Value>,
        repeats: u32,
    ) -> Result<Self, ConfigError> {
        let table: Table = base.to_toml_string().parse().expect("own output parses");
        Self::new(table, axis, values, repeats)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let mut table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        for key in table.keys() {
            if !["base", "axis", "values", "repeats"].contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    key: key.clone(),
                    suggestion: None,
                });
            }
        }
        let base = match table.remove("base") {
            Some(Value::Table(t)) => t,
            Some(_) => {
                return Err(ConfigError::WrongType {
                    key: "base".into(),
                    expected: "table",
                })
            }
            None => return Err(ConfigError::Missing { key: "base".into() }),
        };
        let axis = match table.remove("axis") {
            Some(Value::String(s)) => s,
            Some(_) => {
                return Err(ConfigError::WrongType {
                    key: "axis".into(),
                    expected: "string",
                })
            }
            None => return Err(ConfigError::Missing { key: "axis".into() }),
        };
        let values = match table.remove("values") {
            Some(Value::Array(a)) => a,
            Some(_) => {
                return Err(ConfigError::WrongType {
                    key: "values".into(),
                    expected: "array",
                })
            }
            None => {
                return Err(ConfigError::Missing {
                    key: "values".into(),
                })
            }
        };
        let repeats = match table.remove("repeats") {
            None => 1,
            Some(Value::Integer(i)) if (1..=SEED_STRIDE as i64).contains(&i) => i as u32,
            Some(_) => {
                return Err(ConfigError::Invalid {
                    key: "repeats".into(),
                    reason: format!("must be an integer in 1..={SEED_STRIDE}"),
                })
            }
        };
        Self::new(base, &axis, values, repeats)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn axis(&self) -> &str {
        &self.axis
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn repeats(&self) -> u32 {
        self.repeats
    }

    pub fn base(&self) -> Result<ScenarioConfig, ConfigError> {
        ScenarioConfig::from_table(&self.base)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.values.is_empty() {
            return Err(ConfigError::Invalid {
                key: "values".into(),
                reason: "must not be empty".into(),
            });
        }
        if !(1..=SEED_STRIDE).contains(&u64::from(self.repeats)) {
            return Err(ConfigError::Invalid {
                key: "repeats".into(),
                reason: format!("must be in 1..={SEED_STRIDE}"),
            });
        }
        if self.axis == "seed" || self.axis == "name" {
            return Err(ConfigError::Invalid {
                key: "axis".into(),
                reason: format!("`{}` cannot be swept", self.axis),
            });
        }
        let base = self.base()?;
        let last = (self.values.len() as u64 - 1)
            .checked_mul(SEED_STRIDE)
            .and_then(|s| s.checked_add(u64::from(self.repeats) - 1))
            .and_then(|s| s.checked_add(base.seed));
        if last.is_none() {
            return Err(ConfigError::Invalid {
                key: "base.seed".into(),
                reason: "seed grid overflows u64".into(),
            });
        }
        self.runs().map(|_| ())
    }

    /// Expands the grid in row-major (axis value, repeat) order.
    pub fn runs(&self) -> Result<Vec<SweepRun>, ConfigError> {
        let base_seed = self.base()?.seed;
        let mut runs = Vec::with_capacity(self.values.len() * self.repeats as usize);
        for (i, value) in self.values.iter().enumerate() {
            let mut table = self.base.clone();
            set_path(&mut table, &self.axis, value.clone())?;
            let config = ScenarioConfig::from_table(&table).map_err(|e| ConfigError::Invalid {
                key: format!("values[{i}]"),
                reason: e.to_string(),
            })?;
            for j in 0..self.repeats {
                runs.push(SweepRun {
                    point: i,
                    repeat: j,
                    axis_value: value_label(value),
                    seed: derive_seed(base_seed, i, j),
                    config: config.clone(),
                });
            }
        }
        Ok(runs)
    }
}

/// `base + i·10⁶ + j`.
pub fn derive_seed(base: u64, point: usize, repeat: u32) -> u64 {
    base + point as u64 * SEED_STRIDE + u64::from(repeat)
}

fn set_path(table: &mut Table, path: &str, value: Value) -> Result<(), ConfigError> {
    match path.split_once('.') {
        None => {
            table.insert(path.to_string(), value);
            Ok(())
        }
        Some((head, rest)) => {
            let entry = table
                .entry(head.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            match entry {
                Value::Table(inner) => set_path(inner, rest, value),
                _ => Err(ConfigError::WrongType {
                    key: head.into(),
                    expected: "table",
                }),
            }
        }
    }
}

fn value_label(value: &Value) -> String {
    let raw = match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.+".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Fluid-model operating point for PI-family scenarios.
pub fn oracle_for(cfg: &ScenarioConfig) -> Option<Equilibrium> {
    if !cfg.controller.is_pi_family() {
        return None;
    }
    let load = FluidLoad::new(cfg.n_flows, cfg.rtt_base, cfg.mss).ok()?;
    solve_equilibrium(&load, cfg.link_rate_bytes(), &cfg.curve()).ok()
}

/// Simulates one configuration and summarizes it.
pub fn run_point(cfg: &ScenarioConfig, seed: u64) -> Result<(RunOutput, RunSummary), RunFailure> {
    let out = sim::run(cfg, seed)?;
    let summary = summarize(&out.trace, cfg.warmup)?;
    Ok((out, summary))
}

#[derive(Debug, thiserror::Error)]
pub enum RunFailure {
    #[error(transparent)]
    Sim(#[from] sim::SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn execute(run: &SweepRun, trace_dir: Option<&Path>) -> SweepRecord {
    let cfg = &run.config;
    let mut row = SummaryRow {
        scenario: cfg.name.clone(),
        controller: cfg.controller.name().to_string(),
        n_flows: cfg.n_flows,
        seed: run.seed,
        summary: None,
        oracle: oracle_for(cfg),
        error: None,
    };
    let result = run_point(cfg, run.seed).and_then(|(out, summary)| {
        if let Some(dir) = trace_dir {
            fs::create_dir_all(dir).map_err(|source| RunFailure::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            write_trace_csv(&out.trace, &dir.join("trace.csv"))?;
        }
        Ok((out, summary))
    });
    match result {
        Ok((out, summary)) => {
            row.summary = Some(summary);
            SweepRecord {
                run: run.clone(),
                row,
                digest: Some(out.trace.digest()),
                conserved: Some(out.conserved()),
            }
        }
        Err(e) => {
            row.error = Some(e.to_string());
            SweepRecord {
                run: run.clone(),
                row,
                digest: None,
                conserved: None,
            }
        }
    }
}

/// Directory of one run's trace under `out`.
pub fn trace_dir(out: &Path, run: &SweepRun) -> PathBuf {
    out.join(&run.config.name)
        .join(&run.axis_value)
        .join(format!("seed-{}", run.seed))
}

/// Runs the whole grid in parallel. With `out` set, writes one trace per
/// run plus `summary.csv`, whose rows follow grid order. A failed run is
/// reported in its row and does not stop the sweep.
pub fn run_sweep(spec: &SweepSpec, out: Option<&Path>) -> Result<Vec<SweepRecord>, SweepError> {
    let runs = spec.runs()?;
    let records: Vec<SweepRecord> = runs
        .par_iter()
        .map(|run| execute(run, out.map(|o| trace_dir(o, run)).as_deref()))
        .collect();
    if let Some(out) = out {
        fs::create_dir_all(out).map_err(|source| SweepError::Io {
            path: out.to_path_buf(),
            source,
        })?;
        let rows: Vec<SummaryRow> = records.iter().map(|r| r.row.clone()).collect();
        write_summary_csv(&rows, &out.join("summary.csv"))?;
    }
    Ok(records)
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}
