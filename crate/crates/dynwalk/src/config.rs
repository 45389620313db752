//! Flat `key = value` configuration files and flag/file/default resolution.
//!
//! Keys use the long flag names (`paths`, `slack-low`, ...); underscores are
//! accepted and normalized to dashes. Blank lines and `#` comments are
//! ignored. Lists are comma-separated.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DYNWALK_OUT_DIR";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                what: "config file",
                detail: format!("line {}: expected key=value", lineno + 1),
            })?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(Error::Parse {
                    what: "config file",
                    detail: format!("line {}: empty key", lineno + 1),
                });
            }
            if entries.insert(key.clone(), v.trim().to_owned()).is_some() {
                return Err(Error::Parse {
                    what: "config file",
                    detail: format!("line {}: duplicate key '{key}'", lineno + 1),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Resolves parameters with flag > file > default precedence and records the
/// outcome for echoing into reports.
#[derive(Debug)]
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    resolved: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a ConfigFile) -> Self {
        Self {
            file,
            resolved: BTreeMap::new(),
        }
    }

    pub fn pick<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.raw(key) {
                Some(text) => text
                    .parse::<T>()
                    .map_err(|e| Error::Config(format!("config key '{key}' = '{text}': {e}")))?,
                None => default,
            },
        };
        self.resolved.insert(key.to_owned(), value.to_string());
        Ok(value)
    }

    /// Boolean switch: set if the flag is given or the file says `true`.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let value = flag || self.pick::<bool>(key, None, false)?;
        self.resolved.insert(key.to_owned(), value.to_string());
        Ok(value)
    }

    /// Keys in the config file that no parameter consumed.
    pub fn unused_keys(&self, ignore: &[&str]) -> Vec<String> {
        self.file
            .keys()
            .filter(|k| !self.resolved.contains_key(*k) && !ignore.contains(k))
            .map(str::to_owned)
            .collect()
    }

    pub fn finish(self) -> BTreeMap<String, String> {
        self.resolved
    }
}

/// Comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|p| {
                let p = p.trim();
                p.parse::<f64>().map_err(|e| format!("'{p}': {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

impl Display for FloatList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Comma-separated list of unsigned integers.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedList(pub Vec<u64>);

impl FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|p| {
                let p = p.trim();
                p.parse::<u64>().map_err(|e| format!("'{p}': {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(SeedList)
    }
}

impl Display for SeedList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}
