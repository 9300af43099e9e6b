//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Largest number of output digits accepted.
pub const MAX_DIGITS: u32 = 50;

/// Environment variable overriding the default working precision (bits).
pub const PRECISION_ENV: &str = "ITERASYM_PRECISION";

/// A configuration problem; maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// Every setting a command may use. All fields are optional so that a file
/// and the flags can each supply any subset.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub map: Option<String>,
    pub x0: Option<String>,
    pub u0: Option<String>,
    pub checkpoints: Option<Checkpoints>,
    pub cutoff: Option<u32>,
    pub degree: Option<usize>,
    pub digits: Option<u32>,
    pub precision_bits: Option<u32>,
    pub output: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub series: Option<PathBuf>,
    pub orbit: Option<PathBuf>,
    pub fast: Option<bool>,
    pub timings: Option<bool>,
}

/// Checkpoints as a TOML array of integers or a list string such as
/// `"1..3"` or `"1e4,1e5,1e6"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Checkpoints {
    List(Vec<u64>),
    Text(String),
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config_error(format!("config {}: {}", path.display(), one_line(&e.to_string()))))
    }

    /// Fields set in `flags` replace those here.
    pub fn overlay(self, flags: RunConfig) -> Self {
        RunConfig {
            map: flags.map.or(self.map),
            x0: flags.x0.or(self.x0),
            u0: flags.u0.or(self.u0),
            checkpoints: flags.checkpoints.or(self.checkpoints),
            cutoff: flags.cutoff.or(self.cutoff),
            degree: flags.degree.or(self.degree),
            digits: flags.digits.or(self.digits),
            precision_bits: flags.precision_bits.or(self.precision_bits),
            output: flags.output.or(self.output),
            out: flags.out.or(self.out),
            series: flags.series.or(self.series),
            orbit: flags.orbit.or(self.orbit),
            fast: flags.fast.or(self.fast),
            timings: flags.timings.or(self.timings),
        }
    }

    pub fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> anyhow::Result<&'a T> {
        field.as_ref().ok_or_else(|| config_error(format!("missing required setting `{name}`")))
    }

    pub fn digits_or(&self, default: u32) -> anyhow::Result<u32> {
        let d = self.digits.unwrap_or(default);
        if d == 0 || d > MAX_DIGITS {
            return Err(config_error(format!("digits must be in 1..={MAX_DIGITS}, got {d}")));
        }
        Ok(d)
    }

    /// Flag or file setting, then the environment override, then `default`.
    pub fn precision_or(&self, default: u32) -> anyhow::Result<u32> {
        let bits = match self.precision_bits {
            Some(b) => b,
            None => match std::env::var(PRECISION_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| config_error(format!("{PRECISION_ENV} must be a bit count, got `{v}`")))?,
                Err(_) => default,
            },
        };
        if !(64..=1 << 16).contains(&bits) {
            return Err(config_error(format!("precision must be in 64..=65536 bits, got {bits}")));
        }
        Ok(bits)
    }

    pub fn format(&self) -> OutputFormat {
        self.output.unwrap_or_default()
    }

    pub fn checkpoint_list(&self) -> anyhow::Result<Vec<u64>> {
        match self.require(&self.checkpoints, "checkpoints")? {
            Checkpoints::List(v) => Ok(v.clone()),
            Checkpoints::Text(s) => parse_checkpoints(s),
        }
    }
}

/// Parses `"1..3"`, `"10,100,1000"` or `"1e4,1e5"` (ranges are inclusive).
pub fn parse_checkpoints(s: &str) -> anyhow::Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi) = (parse_index(lo)?, parse_index(hi.trim_start_matches('='))?);
            if hi < lo {
                return Err(config_error(format!("empty checkpoint range `{part}`")));
            }
            if hi - lo > 1_000_000 {
                return Err(config_error(format!("checkpoint range `{part}` is too long")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_index(part)?);
        }
    }
    if out.is_empty() {
        return Err(config_error("no checkpoints given"));
    }
    Ok(out)
}

/// A nonnegative index written as an integer, `1e7` or `10^7`.
pub fn parse_index(s: &str) -> anyhow::Result<u64> {
    let s = s.trim().replace('_', "");
    let bad = || config_error(format!("bad index `{s}`"));
    let pow = |mantissa: &str, exp: &str| -> anyhow::Result<u64> {
        let m: u64 = mantissa.parse().map_err(|_| bad())?;
        let e: u32 = exp.parse().map_err(|_| bad())?;
        10u64.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or_else(bad)
    };
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        pow(m, e)
    } else if let Some(e) = s.strip_prefix("10^") {
        pow("1", e)
    } else {
        s.parse().map_err(|_| bad())
    }
}

pub fn one_line(s: &str) -> String {
    s.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join("; ")
}
