//! Flat `key = value` configuration files.
//!
//! Precedence, highest first: command-line flag, `LCSLAB_*` environment
//! variable, config file, built-in default. Flags and environment variables
//! are merged by clap; this module supplies the file layer.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Keys accepted in a config file (flag names without the leading dashes).
pub const KNOWN_KEYS: &[&str] = &[
    "k",
    "n",
    "d",
    "ell",
    "beta",
    "alpha",
    "p",
    "trials",
    "seed",
    "jobs",
    "format",
    "block-mode",
    "objective",
    "gamma-a",
    "c-h",
    "gamma-star",
    "confidence",
    "h-p",
    "grid",
    "block-symbol",
    "run-match",
    "progress-every",
];

/// A usage problem: bad flag value, malformed config, unknown key.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    idx + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(usage(format!(
                    "config line {}: empty key or value",
                    idx + 1
                )));
            }
            if !KNOWN_KEYS.contains(&key) {
                return Err(usage(format!(
                    "config line {}: unknown key `{key}`",
                    idx + 1
                )));
            }
            values.insert(key.to_owned(), value.to_owned());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                FileConfig::parse(&text)
            }
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key `{key}`: invalid value {v:?}: {e}"))),
        }
    }

    /// Flag value if given, else the file's value.
    pub fn layer<T: FromStr>(&self, flag: Option<T>, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Flag, file, then `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> anyhow::Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.layer(flag, key)?.unwrap_or(default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let f = FileConfig::parse("# comment\ntrials = 100\n\nseed=3\n").unwrap();
        assert_eq!(f.resolve(Some(50usize), "trials", 7).unwrap(), 50);
        assert_eq!(f.resolve(None::<usize>, "trials", 7).unwrap(), 100);
        assert_eq!(f.resolve(None::<usize>, "k", 2).unwrap(), 2);
        assert_eq!(f.resolve(None::<u64>, "seed", 0).unwrap(), 3);
    }

    #[test]
    fn missing_file_means_builtins() {
        let f = FileConfig::load(None).unwrap();
        assert_eq!(f.resolve(None::<usize>, "trials", 100).unwrap(), 100);
    }

    #[test]
    fn errors_name_the_problem() {
        let e = FileConfig::parse("trials = 1\nfoo = 2\n").unwrap_err();
        assert!(e.to_string().contains("`foo`"));
        assert!(e.to_string().contains("line 2"));
        let e = FileConfig::parse("k 2\n").unwrap_err();
        assert!(e.to_string().contains("line 1"));
        assert!(e.downcast_ref::<UsageError>().is_some());
        let f = FileConfig::parse("k = two\n").unwrap();
        assert!(f.get::<usize>("k").is_err());
    }
}
