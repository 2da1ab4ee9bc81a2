//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

/// Every key a config file may contain, with its default (empty for none).
pub const KEYS: &[(&str, &str)] = &[
    ("experiment", ""),
    ("family", "brownian"),
    ("t", "1"),
    ("a", "1"),
    ("a2", "2"),
    ("delta", "1"),
    ("delta2", "1.5"),
    ("index", ""),
    ("dt", "1e-3"),
    ("band", "0.5"),
    ("scheme", "exact"),
    ("spec", "ladder1"),
    ("depth", "40"),
    ("snap_tol", ""),
    ("start", "0"),
    ("start2", "1"),
    ("mu", ""),
    ("lambda", "4"),
    ("cells", "8"),
    ("split_cells", ""),
    ("samples", "10000"),
    ("reps", "10"),
    ("min_pass", ""),
    ("block_sizes", "1,4,16"),
    ("auc_threshold", "0.95"),
    ("tol", "0.05"),
    ("trials", "100"),
    ("seed", ""),
    ("alpha", "0.001"),
    ("control", "empty"),
    ("out", "out"),
    ("workers", "1"),
];

/// Keys that never change results and are left out of the digest.
const UNDIGESTED: &[&str] = &["out", "workers"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            values: KEYS
                .iter()
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

impl ExperimentConfig {
    /// Defaults overlaid with the lines of `text`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", i + 1))?;
            cfg.set(k.trim(), v.trim()).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            bail!("unknown config key `{key}`");
        }
        if value.is_empty() {
            self.values.remove(key);
        } else {
            self.values.insert(key.to_string(), value.to_string());
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("override `{kv}` is not key=value"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Result<Self> {
        self.set(key, &value.to_string())?;
        Ok(self)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.raw(key).ok_or_else(|| anyhow!("config key `{key}` is required"))?;
        v.parse().map_err(|e| anyhow!("config key `{key}` = `{v}`: {e}"))
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(_) => self.get(key).map(Some),
        }
    }

    pub fn positive(&self, key: &str) -> Result<f64> {
        let v: f64 = self.get(key)?;
        if !(v > 0.0 && v.is_finite()) {
            bail!("config key `{key}` must be positive, got {v}");
        }
        Ok(v)
    }

    pub fn list(&self, key: &str) -> Result<Vec<usize>> {
        let v = self.raw(key).ok_or_else(|| anyhow!("config key `{key}` is required"))?;
        v.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|e| anyhow!("config key `{key}`: {e}")))
            .collect()
    }

    pub fn experiment(&self) -> Result<String> {
        self.get("experiment")
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("seed").context("a seed must be given; there is no clock-based default")
    }

    pub fn samples(&self) -> Result<u64> {
        let n: u64 = self.get("samples")?;
        if n == 0 {
            bail!("samples must be at least 1");
        }
        Ok(n)
    }

    pub fn workers(&self) -> Result<usize> {
        let w: usize = self.get("workers")?;
        if w == 0 {
            bail!("workers must be at least 1");
        }
        Ok(w)
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.raw("out").unwrap_or("out"))
    }

    /// Canonical text: sorted `key=value` lines of result-affecting keys.
    pub fn canonical(&self) -> String {
        self.values
            .iter()
            .filter(|(k, _)| !UNDIGESTED.contains(&k.as_str()))
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// First 16 hex digits of the SHA-256 of [`ExperimentConfig::canonical`].
    pub fn digest(&self) -> String {
        let h = Sha256::digest(self.canonical().as_bytes());
        hex::encode(&h[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let c = ExperimentConfig::parse("experiment = equiv\n# note\nseed=5 # trailing\n\ncells = 16").unwrap();
        assert_eq!(c.experiment().unwrap(), "equiv");
        assert_eq!(c.seed().unwrap(), 5);
        assert_eq!(c.get::<usize>("cells").unwrap(), 16);
        assert!(ExperimentConfig::parse("sede = 5").is_err());
        assert!(ExperimentConfig::parse("seed 5").is_err());
        assert!(ExperimentConfig::default().seed().is_err());
        assert!(ExperimentConfig::parse("samples = 0").unwrap().samples().is_err());
    }

    #[test]
    fn digest_ignores_order_and_output_keys() {
        let a = ExperimentConfig::parse("seed=1\nt=2\nexperiment=dim").unwrap();
        let b = ExperimentConfig::parse("experiment=dim\nt=2\nseed=1\nworkers=4\nout=/tmp/x").unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = ExperimentConfig::parse("experiment=dim\nt=3\nseed=1").unwrap();
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 16);
    }

    #[test]
    fn overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_override("a=0.5").unwrap();
        assert_eq!(c.get::<f64>("a").unwrap(), 0.5);
        assert!(c.apply_override("bogus=1").is_err());
        assert!(c.apply_override("a").is_err());
        c.apply_override("index=").unwrap();
        assert_eq!(c.raw("index"), None);
    }
}
