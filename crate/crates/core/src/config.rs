//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! test = DW-EXACT
//! n = 2
//! r = 1
//! seed = 7
//! ```
//!
//! The reserved keys are `test`, `model` (alias `sample`), `replicas`,
//! `seed` and `output`. Every other key must parse as a real number and
//! lands in `params`. Command-line overrides use the same keys through
//! [`ExperimentConfig::set`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub test_id: Option<String>,
    pub model_id: Option<String>,
    pub params: BTreeMap<String, f64>,
    /// `None` means the experiment's own default.
    pub replicas: Option<usize>,
    pub seed: u64,
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn for_test(test_id: &str) -> ExperimentConfig {
        ExperimentConfig { test_id: Some(test_id.to_string()), ..Default::default() }
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got `{raw}`", lineno + 1)))?;
            cfg.set(k.trim(), v.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Sets one key; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim_start_matches("--");
        match key {
            "test" => self.test_id = Some(value.to_string()),
            "model" | "sample" => self.model_id = Some(value.to_string()),
            "replicas" => {
                let r: usize = value.parse().map_err(|_| Error::Config(format!("replicas: `{value}` is not a count")))?;
                if r == 0 {
                    return Err(Error::Config("replicas must be at least 1".into()));
                }
                self.replicas = Some(r);
            }
            "seed" => self.seed = value.parse().map_err(|_| Error::Config(format!("seed: `{value}` is not a u64")))?,
            "output" => self.output_path = Some(value.to_string()),
            "" => return Err(Error::Config("empty key".into())),
            _ => {
                let v: f64 = value.parse().map_err(|_| Error::Config(format!("{key}: `{value}` is not a number")))?;
                if !v.is_finite() {
                    return Err(Error::Config(format!("{key}: value must be finite")));
                }
                self.params.insert(key.to_string(), v);
            }
        }
        Ok(())
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn param_or(&self, key: &str, default: f64) -> f64 {
        self.param(key).unwrap_or(default)
    }

    /// Integer parameter; rejects fractional values.
    pub fn int_param_or(&self, key: &str, default: i64) -> Result<i64> {
        match self.param(key) {
            None => Ok(default),
            Some(v) if v.fract() == 0.0 && v.abs() < 9e15 => Ok(v as i64),
            Some(v) => Err(Error::Config(format!("{key} = {v} must be an integer"))),
        }
    }

    pub fn replicas_or(&self, default: usize) -> usize {
        self.replicas.unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.test_id, &self.model_id) {
            (None, None) => Err(Error::Config("either `test` or `model` must be given".into())),
            (Some(_), Some(_)) => Err(Error::Config("`test` and `model` are mutually exclusive".into())),
            _ => Ok(()),
        }
    }
}
