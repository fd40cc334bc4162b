//! Option resolution: command-line flags override the optional config
//! file, which overrides built-in defaults. Config files are plain
//! `key = value` lines with `#` comments; keys match the flag names.

use std::collections::HashMap;
use std::fmt::Display;
use std::str::FromStr;

use clap::parser::ValueSource;
use clap::ArgMatches;
use jmgames::GameState;

use crate::CliError;

pub struct Options<'a> {
    matches: &'a ArgMatches,
    config: HashMap<String, String>,
}

impl<'a> Options<'a> {
    /// Reads the config file named by `--config`, if any.
    pub fn load(matches: &'a ArgMatches) -> Result<Self, CliError> {
        let config = match matches.get_one::<String>("config") {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::bad_param(format!("cannot read config file '{path}': {e}"))
                })?;
                parse_config(&text)
                    .map_err(|e| CliError::bad_param(format!("config file '{path}': {e}")))?
            }
            None => HashMap::new(),
        };
        Ok(Options { matches, config })
    }

    /// Raw textual value for `key` under the precedence rules.
    fn raw(&self, key: &str) -> Option<&str> {
        if self.matches.value_source(key) == Some(ValueSource::CommandLine) {
            return self.matches.get_one::<String>(key).map(String::as_str);
        }
        if let Some(v) = self.config.get(key) {
            return Some(v.as_str());
        }
        // Falls back to the clap default, when the arg declares one.
        self.matches.get_one::<String>(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::bad_param(format!("invalid value '{raw}' for --{key}: {e}"))
            }),
        }
    }

    pub fn require<T>(&self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::bad_param(format!("missing required parameter --{key}")))
    }

    /// The raw string as given, for inputs that must be parsed exactly
    /// (a decimal coin fed to the rational oracle).
    pub fn require_raw(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key)
            .ok_or_else(|| CliError::bad_param(format!("missing required parameter --{key}")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        if self.matches.value_source(key) == Some(ValueSource::CommandLine) {
            return Ok(self.matches.get_flag(key));
        }
        match self.config.get(key) {
            Some(raw) => raw.parse::<bool>().map_err(|e| {
                CliError::bad_param(format!("invalid value '{raw}' for --{key}: {e}"))
            }),
            None => Ok(false),
        }
    }

    /// A start state given as `a,h`.
    pub fn require_start(&self, key: &str) -> Result<GameState, CliError> {
        let raw = self.require_raw(key)?;
        let (a, h) = raw
            .split_once(',')
            .ok_or_else(|| CliError::bad_param(format!("invalid --{key} '{raw}': expected 'a,h'")))?;
        let a = a.trim().parse::<u32>().map_err(|e| {
            CliError::bad_param(format!("invalid --{key} '{raw}': player chips: {e}"))
        })?;
        let h = h.trim().parse::<u32>().map_err(|e| {
            CliError::bad_param(format!("invalid --{key} '{raw}': bank chips: {e}"))
        })?;
        Ok(GameState::new(a, h))
    }

    pub fn output(&self) -> Option<&str> {
        self.raw("output")
    }

    /// The `--format` flag, limited to the supported set.
    pub fn format(&self) -> Result<&str, CliError> {
        match self.raw("format") {
            Some("json") => Ok("json"),
            Some("csv") => Ok("csv"),
            Some(other) => Err(CliError::bad_param(format!(
                "invalid value '{other}' for --format: expected 'json' or 'csv'"
            ))),
            None => Ok("json"),
        }
    }
}

fn parse_config(text: &str) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected 'key = value'", idx + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines_parse() {
        let map = parse_config("# comment\n\nq = 0.35\ngame=jm2\n nmax = 150 \n").unwrap();
        assert_eq!(map.get("q").map(String::as_str), Some("0.35"));
        assert_eq!(map.get("game").map(String::as_str), Some("jm2"));
        assert_eq!(map.get("nmax").map(String::as_str), Some("150"));
        assert!(parse_config("just words\n").is_err());
    }
}
