//! Flag / config-file / preset resolution.
//!
//! A config file is flat `key = value` text whose keys are the long flag
//! names without dashes. Lines starting with `#` are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key = value", lineno + 1)));
        };
        let key = key.trim().trim_start_matches("--").to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {key}", lineno + 1)));
        }
    }
    Ok(map)
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self {
            file,
            ..Self::default()
        })
    }

    /// Flag value if given, else the config file entry, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = self.lookup(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Like [`Settings::get`] without a default.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = self.lookup(key, flag)?;
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    fn lookup<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("invalid value {raw:?} for {key} in config: {e}"))),
            None => Ok(None),
        }
    }

    /// Records a derived value for the manifest.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Rejects config keys the command never asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let unknown: Vec<&String> = self.file.keys().filter(|k| !self.used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("unknown config keys: {unknown:?}")))
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

/// Comma-separated list, e.g. `8,16,32`.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<T>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<T>, String>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let mut s = Settings {
            file: parse_config("# comment\nsteps = 32\nhurst=0.8\n").unwrap(),
            ..Settings::default()
        };
        assert_eq!(s.get("steps", Some(64usize), 8).unwrap(), 64);
        assert_eq!(s.get::<f64>("hurst", None, 0.75).unwrap(), 0.8);
        assert_eq!(s.get::<u64>("seed", None, 7).unwrap(), 7);
        assert!(s.finish().is_ok());
        assert_eq!(s.resolved()["steps"], "64");
    }

    #[test]
    fn bad_config() {
        assert!(parse_config("steps 32").is_err());
        assert!(parse_config("a=1\na=2").is_err());
        let mut s = Settings {
            file: parse_config("steps = many\nextra = 1").unwrap(),
            ..Settings::default()
        };
        assert!(s.get::<usize>("steps", None, 1).is_err());
        assert!(s.finish().is_err());
    }

    #[test]
    fn lists() {
        let l: List<usize> = "8, 16,32".parse().unwrap();
        assert_eq!(l.0, vec![8, 16, 32]);
        assert_eq!(l.to_string(), "8,16,32");
        assert!("8,x".parse::<List<usize>>().is_err());
    }
}
