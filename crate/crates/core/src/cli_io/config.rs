//! Flat `key = value` configuration files and layered resolution.
//!
//! Keys are the long flag names without dashes (`t-final = 6`); `_` and
//! `-` are interchangeable. `#` starts a comment. A flag given on the
//! command line overrides the file, which overrides the built-in default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::number::Exact;

/// Every key accepted in a configuration file.
pub const KNOWN_KEYS: &[&str] = &[
    "n", "c", "length", "height", "t-final", "dx", "dt", "scheme", "x-min", "x-max", "x0", "p0", "w0",
    "mass", "snapshot-stride", "periods", "tolerance", "compare", "workers", "cache-dir", "out-dir",
    "bins", "e-min", "e-max", "radius", "resolution",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn canonical_key(key: &str) -> String {
    let k = key.trim().replace('_', "-");
    if k == "v" { "height".to_string() } else { k }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = canonical_key(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// CLI value, else the file's value, else `default`.
    pub fn pick<T>(&self, cli: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(cli, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Error::Config(format!("{key} = {raw}: {e}"))),
        }
    }
}

/// Barrier counts: comma-separated integers or inclusive ranges `a..b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NList(pub Vec<usize>);

impl FromStr for NList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(s.to_string(), why.to_string());
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some((a, b)) = item.split_once("..") {
                let a: usize = a.trim().parse().map_err(|_| bad("bad range start"))?;
                let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad("bad range end"))?;
                if b < a {
                    return Err(bad("empty range"));
                }
                out.extend(a..=b);
            } else {
                out.push(item.parse().map_err(|_| bad("expected an integer or a..b"))?);
            }
        }
        Ok(NList(out))
    }
}

/// Comma-separated exact ratios such as `4,7/3,0.25`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CList(pub Vec<Exact>);

impl FromStr for CList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Exact>>>()
            .map(CList)
    }
}

/// Comma-separated positive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodList(pub Vec<usize>);

impl FromStr for PeriodList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(t.to_string(), e.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(PeriodList)
    }
}
