//! Flat `key = value` run configuration.
//!
//! ```text
//! # reference operating point
//! lambda_pu = 0.5
//! lambda_su = 0.5
//! phi_nc = 0.6
//! phi_c = 0.8
//! p_avg = 0.5
//! p_max = 1
//! policy = fbdpp
//! v = 500
//! frames = 1000
//! ```
//!
//! A two-point model needs `lambda_pu`, `lambda_su`, `phi_nc`, `phi_c`, `p_avg`
//! and `p_max` (`mu_su_max` defaults to 1). A finite grid replaces `phi_nc`/`phi_c`
//! with `power_levels`, `phi_levels` and `mu_su_levels`, all comma-separated.
//! Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{ModelError, ModelParams, PowerCurve, PowerSet};
use crate::sim::{PolicySpec, PowerAccounting, Scenario};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

const KEYS: &[&str] = &[
    "lambda_pu",
    "lambda_su",
    "a_max",
    "phi_nc",
    "phi_c",
    "mu_su_max",
    "p_avg",
    "p_max",
    "power_levels",
    "phi_levels",
    "mu_su_levels",
    "policy",
    "oracle_q",
    "oracle_p",
    "v",
    "v_list",
    "frames",
    "seed",
    "window",
    "lambda_schedule",
    "power_accounting",
    "out_dir",
];

/// Everything a command needs, validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub policy: PolicySpec,
    pub v: f64,
    pub v_list: Vec<f64>,
    pub frames: u64,
    pub seed: u64,
    pub window: usize,
    pub lambda_schedule: Vec<(u64, f64)>,
    pub power_accounting: PowerAccounting,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line: i + 1,
                    key: key.to_string(),
                });
            }
            if map.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(ConfigError::DuplicateKey {
                    line: i + 1,
                    key: key.to_string(),
                });
            }
        }
        let c = Raw(map);

        let params = c.params()?;
        let policy = match c.get("policy").unwrap_or("fbdpp") {
            "oracle-stationary" => PolicySpec::OracleStationary {
                q: c.required_f64("oracle_q")?,
                p: c.required_f64("oracle_p")?,
            },
            name => parse_policy(name).map_err(|msg| bad("policy", msg))?,
        };
        let v = c.f64_or("v", 500.0)?;
        let v_list = match c.get("v_list") {
            Some(s) => parse_list(s).map_err(|msg| bad("v_list", msg))?,
            None => vec![v],
        };
        let power_accounting = match c.get("power_accounting").unwrap_or("strict") {
            "strict" => PowerAccounting::Strict,
            "skip-when-empty" => PowerAccounting::SkipWhenEmpty,
            other => {
                return Err(bad(
                    "power_accounting",
                    format!("expected strict or skip-when-empty, got {other}"),
                ))
            }
        };
        let lambda_schedule = match c.get("lambda_schedule") {
            Some(s) => parse_schedule(s).map_err(|msg| bad("lambda_schedule", msg))?,
            None => Vec::new(),
        };
        let config = RunConfig {
            params,
            policy,
            v,
            v_list,
            frames: c.parsed_or("frames", 1000)?,
            seed: c.parsed_or("seed", 1)?,
            window: c.parsed_or("window", 100)?,
            lambda_schedule,
            power_accounting,
            out_dir: PathBuf::from(c.get("out_dir").unwrap_or(".")),
        };
        config.validate()?;
        Ok(config)
    }

    /// Re-checks the whole configuration, e.g. after command-line overrides.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate()?;
        if self.v_list.is_empty()
            || self
                .v_list
                .iter()
                .chain([&self.v])
                .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return Err(bad("v", "control parameters must be positive".into()));
        }
        if self.frames == 0 {
            return Err(bad("frames", "must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(bad("window", "must be at least 1".into()));
        }
        self.scenario().validate().map_err(|e| bad("scenario", e.to_string()))?;
        Ok(())
    }

    pub fn scenario(&self) -> Scenario {
        let mut s = Scenario::new(self.params.clone(), self.policy, self.v, self.frames, self.seed)
            .with_schedule(self.lambda_schedule.clone());
        s.window = self.window;
        s.power_accounting = self.power_accounting;
        s
    }
}

pub fn parse_policy(name: &str) -> Result<PolicySpec, String> {
    match name {
        "fbdpp" => Ok(PolicySpec::Fbdpp),
        "no-coop" => Ok(PolicySpec::NoCoop),
        "always-coop" => Ok(PolicySpec::AlwaysCoop),
        "counter" => Ok(PolicySpec::CounterBased),
        other => Err(format!(
            "unknown policy `{other}` (expected fbdpp, no-coop, always-coop, counter or oracle-stationary)"
        )),
    }
}

/// Comma-separated numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", t.trim())))
        .collect()
}

/// `frame:lambda` pairs separated by commas, e.g. `350:0.2,700:0.55`.
pub fn parse_schedule(s: &str) -> Result<Vec<(u64, f64)>, String> {
    s.split(',')
        .map(|item| {
            let (k, l) = item
                .split_once(':')
                .ok_or_else(|| format!("`{item}` is not frame:lambda"))?;
            let k = k.trim().parse::<u64>().map_err(|e| format!("`{k}`: {e}"))?;
            let l = l.trim().parse::<f64>().map_err(|e| format!("`{l}`: {e}"))?;
            Ok((k, l))
        })
        .collect()
}

fn bad(key: &str, msg: String) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        msg,
    }
}

struct Raw(BTreeMap<String, String>);

impl Raw {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            Some(s) => s.parse().map_err(|e: T::Err| bad(key, format!("`{s}`: {e}"))),
            None => Ok(default),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.parsed_or(key, default)
    }

    fn required_f64(&self, key: &'static str) -> Result<f64, ConfigError> {
        match self.get(key) {
            Some(_) => self.parsed_or(key, 0.0),
            None => Err(ConfigError::Missing(key)),
        }
    }

    fn list(&self, key: &'static str) -> Result<Vec<f64>, ConfigError> {
        let s = self.get(key).ok_or(ConfigError::Missing(key))?;
        parse_list(s).map_err(|msg| bad(key, msg))
    }

    fn params(&self) -> Result<ModelParams, ConfigError> {
        let lambda_pu = self.required_f64("lambda_pu")?;
        let lambda_su = self.required_f64("lambda_su")?;
        let p_avg = self.required_f64("p_avg")?;
        let p_max = self.required_f64("p_max")?;
        let a_max: u32 = self.parsed_or("a_max", 1)?;

        let params = if self.get("power_levels").is_some() {
            for key in ["phi_nc", "phi_c", "mu_su_max"] {
                if self.get(key).is_some() {
                    return Err(bad(key, "not allowed together with power_levels".into()));
                }
            }
            let levels = self.list("power_levels")?;
            let phi = self.list("phi_levels")?;
            let mu = self.list("mu_su_levels")?;
            ModelParams {
                lambda_pu,
                lambda_su,
                a_max,
                phi: PowerCurve::on_levels(&levels, &phi)?,
                mu_su: PowerCurve::on_levels(&levels, &mu)?,
                p_avg,
                p_max,
                power_set: PowerSet::grid(levels)?,
            }
        } else {
            let mut p = ModelParams::two_point(
                lambda_pu,
                lambda_su.min(1.0),
                self.required_f64("phi_nc")?,
                self.required_f64("phi_c")?,
                self.f64_or("mu_su_max", 1.0)?,
                p_avg,
                p_max,
            )?;
            p.a_max = a_max;
            p.lambda_su = lambda_su;
            p
        };
        params.validate()?;
        Ok(params)
    }
}
