//! Scenario files: flat TOML with an optional `[aqm]` table.
//!
//! ```toml
//! name = "ladder"
//! controller = "curvy_pi2"
//! link_rate = 100e6      # bits/s
//! rtt_base = 0.1         # s
//! n_flows = 10
//! duration = 60          # s
//!
//! [aqm]
//! q0 = 0.010
//! q1 = 0.095
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::ConfigError;
use crate::aqm::{CodelParams, ConvexRedConfig, MarkingMode, PiGains, SoftTargetCurve};
use crate::metrics::DEFAULT_WARMUP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Plain PI: the controller output is applied directly.
    PiFixed,
    Pi2Fixed,
    CurvyPi2,
    ConvexRed,
    CodelFixed,
    CodelSoft,
    None,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 7] = [
        ControllerKind::PiFixed,
        ControllerKind::Pi2Fixed,
        ControllerKind::CurvyPi2,
        ControllerKind::ConvexRed,
        ControllerKind::CodelFixed,
        ControllerKind::CodelSoft,
        ControllerKind::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::PiFixed => "pi_fixed",
            ControllerKind::Pi2Fixed => "pi2_fixed",
            ControllerKind::CurvyPi2 => "curvy_pi2",
            ControllerKind::ConvexRed => "convex_red",
            ControllerKind::CodelFixed => "codel_fixed",
            ControllerKind::CodelSoft => "codel_soft",
            ControllerKind::None => "none",
        }
    }

    pub fn is_pi_family(self) -> bool {
        matches!(
            self,
            ControllerKind::PiFixed | ControllerKind::Pi2Fixed | ControllerKind::CurvyPi2
        )
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ControllerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ControllerKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown controller {s:?}, expected one of {}",
                    names.join(", ")
                )
            })
    }
}

fn marking_name(mode: MarkingMode) -> &'static str {
    match mode {
        MarkingMode::Drop => "drop",
        MarkingMode::ClassicEcnMark => "classic_ecn_mark",
    }
}

/// Every controller parameter, whichever controller is selected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AqmParams {
    pub alpha: f64,
    pub beta: f64,
    /// Controller sampling period, seconds. Also the trace cadence.
    pub period: f64,
    pub q0: f64,
    pub q1: f64,
    pub interval: f64,
    pub span: f64,
    pub window: f64,
    pub q_max: f64,
    pub exponent: f64,
}

impl Default for AqmParams {
    fn default() -> Self {
        let gains = PiGains::default();
        let codel = CodelParams::default();
        AqmParams {
            alpha: gains.alpha,
            beta: gains.beta,
            period: gains.period,
            q0: 0.010,
            q1: 0.095,
            interval: codel.interval,
            span: codel.span,
            window: codel.window,
            q_max: 0.100,
            exponent: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub controller: ControllerKind,
    pub marking: MarkingMode,
    /// Whether senders negotiate ECN.
    pub ecn_capable: bool,
    /// Bits per second.
    pub link_rate: f64,
    /// Two-way propagation delay, seconds.
    pub rtt_base: f64,
    pub n_flows: u32,
    /// Simulated seconds.
    pub duration: f64,
    /// Segment size in bytes.
    pub mss: u32,
    /// Hard buffer limit in bytes; `None` means four bandwidth-delay products.
    pub capacity: Option<u64>,
    pub seed: u64,
    /// Seconds excluded from run summaries.
    pub warmup: f64,
    pub aqm: AqmParams,
}

const TOP_KEYS: [&str; 13] = [
    "name",
    "controller",
    "marking",
    "ecn_capable",
    "link_rate",
    "rtt_base",
    "n_flows",
    "duration",
    "mss",
    "capacity",
    "seed",
    "warmup",
    "aqm",
];

const AQM_KEYS: [&str; 10] = [
    "alpha", "beta", "period", "q0", "q1", "interval", "span", "window", "q_max", "exponent",
];

pub const DEFAULT_MSS: u32 = 1500;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_NAME: &str = "scenario";

impl ScenarioConfig {
    /// Link rate in bytes per second.
    pub fn link_rate_bytes(&self) -> f64 {
        self.link_rate / 8.0
    }

    pub fn bdp_bytes(&self) -> f64 {
        self.link_rate_bytes() * self.rtt_base
    }

    pub fn effective_capacity(&self) -> u64 {
        self.capacity
            .unwrap_or_else(|| (4.0 * self.bdp_bytes()).ceil() as u64)
    }

    /// Soft-target curve actually used: fixed-target controllers drop `q1`.
    pub fn curve(&self) -> SoftTargetCurve {
        let q1 = if self.controller == ControllerKind::CurvyPi2 {
            self.aqm.q1
        } else {
            0.0
        };
        SoftTargetCurve::new(self.aqm.q0, q1).expect("validated")
    }

    pub fn gains(&self) -> PiGains {
        PiGains {
            alpha: self.aqm.alpha,
            beta: self.aqm.beta,
            period: self.aqm.period,
        }
    }

    pub fn codel_params(&self) -> CodelParams {
        let span = if self.controller == ControllerKind::CodelSoft {
            self.aqm.span
        } else {
            0.0
        };
        CodelParams {
            base_target: self.aqm.q0,
            span,
            window: self.aqm.window,
            interval: self.aqm.interval,
        }
    }

    pub fn red_config(&self) -> ConvexRedConfig {
        ConvexRedConfig::new(self.aqm.q_max, self.aqm.exponent).expect("validated")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        Self::from_table(&table)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_table(table: &Table) -> Result<Self, ConfigError> {
        check_keys(table, &TOP_KEYS, "")?;
        let empty = Table::new();
        let aqm_table = match table.get("aqm") {
            Some(Value::Table(t)) => t,
            Some(_) => {
                return Err(ConfigError::WrongType {
                    key: "aqm".into(),
                    expected: "table",
                })
            }
            None => &empty,
        };
        check_keys(aqm_table, &AQM_KEYS, "aqm.")?;

        let d = AqmParams::default();
        let aqm = AqmParams {
            alpha: opt_f64(aqm_table, "aqm.alpha", "alpha")?.unwrap_or(d.alpha),
            beta: opt_f64(aqm_table, "aqm.beta", "beta")?.unwrap_or(d.beta),
            period: opt_f64(aqm_table, "aqm.period", "period")?.unwrap_or(d.period),
            q0: opt_f64(aqm_table, "aqm.q0", "q0")?.unwrap_or(d.q0),
            q1: opt_f64(aqm_table, "aqm.q1", "q1")?.unwrap_or(d.q1),
            interval: opt_f64(aqm_table, "aqm.interval", "interval")?.unwrap_or(d.interval),
            span: opt_f64(aqm_table, "aqm.span", "span")?.unwrap_or(d.span),
            window: opt_f64(aqm_table, "aqm.window", "window")?.unwrap_or(d.window),
            q_max: opt_f64(aqm_table, "aqm.q_max", "q_max")?.unwrap_or(d.q_max),
            exponent: opt_f64(aqm_table, "aqm.exponent", "exponent")?.unwrap_or(d.exponent),
        };

        let controller = required(opt_str(table, "controller")?, "controller")?;
        let controller = controller.parse().map_err(|reason| ConfigError::Invalid {
            key: "controller".into(),
            reason,
        })?;
        let marking = match opt_str(table, "marking")?.as_deref() {
            None | Some("drop") => MarkingMode::Drop,
            Some("classic_ecn_mark") => MarkingMode::ClassicEcnMark,
            Some(other) => {
                return Err(ConfigError::Invalid {
                    key: "marking".into(),
                    reason: format!("unknown marking {other:?}, expected drop or classic_ecn_mark"),
                })
            }
        };

        let cfg = ScenarioConfig {
            name: opt_str(table, "name")?.unwrap_or_else(|| DEFAULT_NAME.to_string()),
            controller,
            marking,
            ecn_capable: opt_bool(table, "ecn_capable")?.unwrap_or(true),
            link_rate: required(opt_f64(table, "link_rate", "link_rate")?, "link_rate")?,
            rtt_base: required(opt_f64(table, "rtt_base", "rtt_base")?, "rtt_base")?,
            n_flows: required(opt_uint(table, "n_flows", u64::from(u32::MAX))?, "n_flows")? as u32,
            duration: required(opt_f64(table, "duration", "duration")?, "duration")?,
            mss: opt_uint(table, "mss", u64::from(u32::MAX))?.map_or(DEFAULT_MSS, |v| v as u32),
            capacity: opt_uint(table, "capacity", u64::MAX)?,
            seed: opt_uint(table, "seed", u64::MAX)?.unwrap_or(DEFAULT_SEED),
            warmup: opt_f64(table, "warmup", "warmup")?.unwrap_or(DEFAULT_WARMUP),
            aqm,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    key: key.into(),
                    reason: format!("must be > 0, got {v}"),
                })
            }
        };
        let non_negative = |key: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    key: key.into(),
                    reason: format!("must be >= 0, got {v}"),
                })
            }
        };
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(ConfigError::Invalid {
                key: "name".into(),
                reason: "must be non-empty and contain no path separators".into(),
            });
        }
        positive("link_rate", self.link_rate)?;
        positive("rtt_base", self.rtt_base)?;
        positive("duration", self.duration)?;
        positive("mss", f64::from(self.mss))?;
        non_negative("warmup", self.warmup)?;
        if let Some(cap) = self.capacity {
            if cap < u64::from(self.mss) {
                return Err(ConfigError::Invalid {
                    key: "capacity".into(),
                    reason: format!(
                        "must hold at least one {}-byte segment, got {cap}",
                        self.mss
                    ),
                });
            }
        }
        let a = &self.aqm;
        positive("aqm.alpha", a.alpha)?;
        positive("aqm.beta", a.beta)?;
        positive("aqm.period", a.period)?;
        if a.period < 1e-6 {
            return Err(ConfigError::Invalid {
                key: "aqm.period".into(),
                reason: format!("must be at least 1 µs, got {}", a.period),
            });
        }
        positive("aqm.q0", a.q0)?;
        non_negative("aqm.q1", a.q1)?;
        positive("aqm.interval", a.interval)?;
        non_negative("aqm.span", a.span)?;
        positive("aqm.window", a.window)?;
        positive("aqm.q_max", a.q_max)?;
        if !(a.exponent.is_finite() && a.exponent >= 1.0) {
            return Err(ConfigError::Invalid {
                key: "aqm.exponent".into(),
                reason: format!("must be >= 1, got {}", a.exponent),
            });
        }
        Ok(())
    }

    /// Writes every key explicitly, so defaults are pinned in the output.
    pub fn to_toml_string(&self) -> String {
        let mut t = Table::new();
        t.insert("name".into(), self.name.clone().into());
        t.insert("controller".into(), self.controller.name().into());
        t.insert("marking".into(), marking_name(self.marking).into());
        t.insert("ecn_capable".into(), self.ecn_capable.into());
        t.insert("link_rate".into(), self.link_rate.into());
        t.insert("rtt_base".into(), self.rtt_base.into());
        t.insert("n_flows".into(), i64::from(self.n_flows).into());
        t.insert("duration".into(), self.duration.into());
        t.insert("mss".into(), i64::from(self.mss).into());
        if let Some(cap) = self.capacity {
            t.insert("capacity".into(), int_value(cap));
        }
        t.insert("seed".into(), int_value(self.seed));
        t.insert("warmup".into(), self.warmup.into());
        let a = &self.aqm;
        let mut aqm = Table::new();
        for (k, v) in [
            ("alpha", a.alpha),
            ("beta", a.beta),
            ("period", a.period),
            ("q0", a.q0),
            ("q1", a.q1),
            ("interval", a.interval),
            ("span", a.span),
            ("window", a.window),
            ("q_max", a.q_max),
            ("exponent", a.exponent),
        ] {
            aqm.insert(k.into(), v.into());
        }
        t.insert("aqm".into(), Value::Table(aqm));
        toml::to_string(&t).expect("plain table serializes")
    }
}

// TOML integers are signed 64-bit; larger values travel as strings.
fn int_value(v: u64) -> Value {
    match i64::try_from(v) {
        Ok(i) => Value::Integer(i),
        Err(_) => Value::String(v.to_string()),
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    ScenarioConfig::from_path(path)
}

fn check_keys(table: &Table, known: &[&str], prefix: &str) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !known.contains(&key.as_str()) {
            let suggestion = known
                .iter()
                .map(|k| (strsim::damerau_levenshtein(key, k), *k))
                .filter(|(d, _)| *d <= 2.max(key.len() / 3))
                .min()
                .map(|(_, k)| format!("{prefix}{k}"));
            return Err(ConfigError::UnknownKey {
                key: format!("{prefix}{key}"),
                suggestion,
            });
        }
    }
    Ok(())
}

fn required<T>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::Missing { key: key.into() })
}

fn opt_f64(table: &Table, path: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Float(f)) => Ok(Some(*f)),
        Some(Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(_) => Err(ConfigError::WrongType {
            key: path.into(),
            expected: "number",
        }),
    }
}

fn opt_uint(table: &Table, key: &str, max: u64) -> Result<Option<u64>, ConfigError> {
    let v = match table.get(key) {
        None => return Ok(None),
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(Value::String(s)) => s.parse::<u64>().map_err(|_| ConfigError::WrongType {
            key: key.into(),
            expected: "non-negative integer",
        })?,
        Some(Value::Integer(i)) => {
            return Err(ConfigError::Invalid {
                key: key.into(),
                reason: format!("must be >= 0, got {i}"),
            })
        }
        Some(_) => {
            return Err(ConfigError::WrongType {
                key: key.into(),
                expected: "non-negative integer",
            })
        }
    };
    if v > max {
        return Err(ConfigError::Invalid {
            key: key.into(),
            reason: format!("must be <= {max}, got {v}"),
        });
    }
    Ok(Some(v))
}

fn opt_str(table: &Table, key: &str) -> Result<Option<String>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(ConfigError::WrongType {
            key: key.into(),
            expected: "string",
        }),
    }
}

fn opt_bool(table: &Table, key: &str) -> Result<Option<bool>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Boolean(b)) => Ok(Some(*b)),
        Some(_) => Err(ConfigError::WrongType {
            key: key.into(),
            expected: "boolean",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        controller = "curvy_pi2"
        link_rate = 100e6
        rtt_base = 0.1
        n_flows = 10
        duration = 60
    "#;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.controller, ControllerKind::CurvyPi2);
        assert_eq!(cfg.marking, MarkingMode::Drop);
        assert_eq!(cfg.mss, DEFAULT_MSS);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.warmup, DEFAULT_WARMUP);
        assert_eq!(cfg.aqm, AqmParams::default());
        assert_eq!(cfg.aqm.alpha, 0.25);
        assert_eq!(cfg.aqm.beta, 2.5);
        assert_eq!(cfg.aqm.period, 0.016);
        // 4 × 12.5 MB/s × 0.1 s
        assert_eq!(cfg.effective_capacity(), 5_000_000);
    }

    #[test]
    fn negative_q1_names_the_key() {
        let text = format!("{MINIMAL}\n[aqm]\nq1 = -0.01\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref key, .. } if key == "aqm.q1"));
        assert!(err.to_string().contains("q1"));
    }

    #[test]
    fn typo_suggests_nearest_key() {
        let text = format!("{MINIMAL}\n[aqm]\nalhpa = 0.3\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("aqm.alhpa"), "{msg}");
        assert!(msg.contains("did you mean `aqm.alpha`"), "{msg}");
        let err = ScenarioConfig::from_toml_str(&format!("{MINIMAL}\nduraton = 3\n")).unwrap_err();
        assert!(err.to_string().contains("did you mean `duration`"));
        let err = ScenarioConfig::from_toml_str(&format!("{MINIMAL}\nzzzzzzzz = 3\n")).unwrap_err();
        assert!(matches!(
            err,
            ConfigError::UnknownKey {
                suggestion: None,
                ..
            }
        ));
    }

    #[test]
    fn missing_required_key() {
        let err =
            ScenarioConfig::from_toml_str("controller = \"none\"\nlink_rate = 1e6\n").unwrap_err();
        assert!(matches!(err, ConfigError::Missing { ref key } if key == "rtt_base"));
    }

    #[test]
    fn rejects_non_positive_rates_and_bad_types() {
        let bad = MINIMAL.replace("link_rate = 100e6", "link_rate = 0");
        assert!(matches!(
            ScenarioConfig::from_toml_str(&bad),
            Err(ConfigError::Invalid { ref key, .. }) if key == "link_rate"
        ));
        let bad = MINIMAL.replace("n_flows = 10", "n_flows = \"ten\"");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
        let bad = MINIMAL.replace("curvy_pi2", "pie");
        assert!(ScenarioConfig::from_toml_str(&bad)
            .unwrap_err()
            .to_string()
            .contains("controller"));
        let bad = format!("{MINIMAL}\n[aqm]\nexponent = 0.5\n");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn irrelevant_parameters_are_ignored() {
        let text = format!(
            "{}\n[aqm]\nq1 = 0.2\nspan = 0.3\n",
            MINIMAL.replace("curvy_pi2", "pi2_fixed")
        );
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        assert!(cfg.curve().is_fixed());
        assert_eq!(cfg.codel_params().span, 0.0);
    }

    #[test]
    fn serialize_then_reparse_is_identity() {
        let text = format!(
            "{MINIMAL}\ncapacity = 123456\nmarking = \"classic_ecn_mark\"\n[aqm]\nq0 = 0.005\nalpha = 0.1\n"
        );
        let mut cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
        cfg.seed = u64::MAX;
        cfg.aqm.q1 = 1.0 / 3.0;
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }
}
