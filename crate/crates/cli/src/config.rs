//! Flat `key=value` experiment configs. One assignment per line, `#` starts
//! a comment, blank lines ignored. Every key must be known to the selected
//! experiment (its defaults define the schema), so typos fail loudly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Defaults first, then overrides from the optional file. Keys absent
    /// from the defaults are rejected.
    pub fn load(
        defaults: &[(&str, &str)],
        file: Option<&Path>,
    ) -> Result<Config, ConfigError> {
        let mut values: BTreeMap<String, String> = defaults
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = match raw.find('#') {
                    Some(i) => &raw[..i],
                    None => raw,
                };
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    ConfigError(format!(
                        "{}:{}: expected key=value, got `{line}`",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                let key = key.trim();
                if !values.contains_key(key) {
                    return Err(ConfigError(format!(
                        "{}:{}: unknown key `{key}` for this experiment",
                        path.display(),
                        lineno + 1
                    )));
                }
                values.insert(key.to_string(), value.trim().to_string());
            }
        }
        Ok(Config { values })
    }

    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.values.clone()
    }

    fn raw(&self, key: &str) -> Result<&str, ConfigError> {
        self.values
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| ConfigError(format!("missing key `{key}`")))
    }

    pub fn get_str(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key)
    }

    pub fn get_usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.raw(key)?
            .parse()
            .map_err(|e| ConfigError(format!("key `{key}`: {e}")))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.raw(key)?
            .parse()
            .map_err(|e| ConfigError(format!("key `{key}`: {e}")))
    }

    pub fn get_f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.raw(key)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| ConfigError(format!("key `{key}`: {e}")))
            })
            .collect()
    }

    pub fn get_usize_list(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        self.raw(key)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| ConfigError(format!("key `{key}`: {e}")))
            })
            .collect()
    }

    pub fn get_str_list(&self, key: &str) -> Result<Vec<String>, ConfigError> {
        Ok(self
            .raw(key)?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect())
    }
}
