use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

/// Settings read from `--config`. Every field is optional; flags override
/// them and built-in defaults fill the rest.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub particles: Option<usize>,
    pub probe: Option<String>,
    pub post: Option<String>,
    pub linewidth: Option<f64>,
    pub epsilon: Option<f64>,
    pub stages: Option<Vec<String>>,
    #[serde(default)]
    pub grape: GrapeConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapeConfig {
    pub target: Option<String>,
    /// Seconds, or a string with a unit suffix such as `"600u"`.
    pub duration: Option<toml::Value>,
    pub segments: Option<usize>,
    pub max_amplitude_hz: Option<f64>,
    pub rf_scales: Option<Vec<f64>>,
    pub stop_fidelity: Option<f64>,
    pub max_iterations: Option<usize>,
    pub starts: Option<usize>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.system, &mut cfg.out_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Parses `600u`, `600us`, `0.6ms`, `6e-4`, `1s`. Bare numbers are seconds.
pub fn parse_duration(text: &str) -> Result<f64> {
    let t = text.trim();
    let split = t.find(|c: char| c.is_ascii_alphabetic() || c == 'µ').unwrap_or(t.len());
    // keep exponent markers like 6e-4 with the number
    let split = if t[split..].starts_with(['e', 'E']) && t[split + 1..].starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+') {
        t[split + 1..].find(|c: char| c.is_ascii_alphabetic() || c == 'µ').map_or(t.len(), |k| split + 1 + k)
    } else {
        split
    };
    let (num, unit) = t.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| Error::Config(format!("bad duration {text:?}")))?;
    let scale = match unit.trim() {
        "" | "s" => 1.0,
        "m" | "ms" => 1e-3,
        "u" | "us" | "µs" | "µ" => 1e-6,
        "n" | "ns" => 1e-9,
        other => return Err(Error::Config(format!("unknown duration unit {other:?} in {text:?}"))),
    };
    let secs = value * scale;
    if !(secs >= 0.0) || !secs.is_finite() {
        return Err(Error::Config(format!("duration {text:?} must be non-negative")));
    }
    Ok(secs)
}

pub(crate) fn duration_value(v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => parse_duration(&f.to_string()),
        toml::Value::Integer(i) => parse_duration(&i.to_string()),
        toml::Value::String(s) => parse_duration(s),
        other => Err(Error::Config(format!("duration must be a number or string, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("600u").unwrap(), 600e-6);
        assert_eq!(parse_duration("600us").unwrap(), 600e-6);
        assert_eq!(parse_duration("0.6ms").unwrap(), 0.6e-3);
        assert_eq!(parse_duration("6e-4").unwrap(), 6e-4);
        assert_eq!(parse_duration("6e-1ms").unwrap(), 6e-4);
        assert_eq!(parse_duration("0").unwrap(), 0.0);
        assert!(parse_duration("-1u").is_err());
        assert!(parse_duration("5 parsecs").is_err());
        assert!(parse_duration("").is_err());
    }

    #[test]
    fn config_parses_and_rejects_unknown_keys() {
        let cfg = RunConfig::from_toml_str("probe = \"13\"\n[grape]\ntarget = \"cnot2\"\nduration = \"500u\"\n").unwrap();
        assert_eq!(cfg.probe.as_deref(), Some("13"));
        assert_eq!(duration_value(cfg.grape.duration.as_ref().unwrap()).unwrap(), 500e-6);
        assert!(RunConfig::from_toml_str("prob = 1").is_err());
    }
}
