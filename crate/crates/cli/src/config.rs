//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{io_error, CliError};

pub const KEYS: &[&str] = &[
    "a", "omega", "sigma", "L", "lambda", "tau_window", "mode_cap", "mode_tol", "quad_tol", "a_eps",
    "mode_sum", "n_total", "n_accel", "alpha", "a_min", "a_max", "steps", "fd_step", "workers",
    "format", "output", "out_dir", "omegas_small", "omegas_large",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("line {}: expected 'key = value'", n + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Validation(format!("line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Validation(format!("config key '{key}': cannot parse '{v}'"))),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Flag value, else config value, else `default`.
pub fn pick<T: FromStr>(flag: Option<T>, config: &ConfigFile, key: &str, default: T) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(config.get(key)?.unwrap_or(default)),
    }
}

/// Comma- or whitespace-separated list of numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Validation(format!("bad number '{t}' in list"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let c = ConfigFile::parse("# header\nsigma = 5\n\nL=200 # cavity\n").unwrap();
        assert_eq!(c.get::<f64>("sigma").unwrap(), Some(5.0));
        assert_eq!(c.get::<f64>("L").unwrap(), Some(200.0));
        assert_eq!(c.get::<f64>("omega").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ConfigFile::parse("sigmaa = 1").is_err());
        assert!(ConfigFile::parse("sigma 1").is_err());
        let c = ConfigFile::parse("sigma = x").unwrap();
        assert!(c.get::<f64>("sigma").is_err());
    }

    #[test]
    fn flags_take_precedence() {
        let c = ConfigFile::parse("sigma = 5").unwrap();
        assert_eq!(pick(Some(0.4), &c, "sigma", 1.0).unwrap(), 0.4);
        assert_eq!(pick(None, &c, "sigma", 1.0).unwrap(), 5.0);
        assert_eq!(pick(None, &c, "omega", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.05, 0.4 1").unwrap(), vec![0.05, 0.4, 1.0]);
        assert!(parse_list("0.1,x").is_err());
    }
}
