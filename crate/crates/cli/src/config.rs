//! Flat `key = value` configuration files with `#` comments.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Parsed key/value pairs. Typed access consumes keys, and [`KeyValues::finish`]
/// rejects whatever is left, so misspelled keys never pass silently.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line_no}: expected `key = value`")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(CliError::Config(format!("line {line_no}: invalid key {key:?}")));
            }
            if entries
                .insert(key.to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(CliError::Config(format!("line {line_no}: duplicate key {key:?}")));
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("line {line}: bad value {value:?} for {key}: {e}"))),
        }
    }

    pub fn take_or<T: FromStr>(&mut self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.take(key)?.unwrap_or(default))
    }

    /// Comma-separated list; an empty value gives an empty list.
    pub fn take_list<T: FromStr>(&mut self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<T>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("line {line}: bad list {value:?} for {key}: {e}"))),
        }
    }

    pub fn finish(self) -> CliResult<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(CliError::Config(format!("line {line}: unknown key {key:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_typed_values() {
        let mut kv = KeyValues::parse("# run\nepochs = 10\n\nname=boxes # inline\nskip = 2, 4\nempty =\n").unwrap();
        assert_eq!(kv.take::<usize>("epochs").unwrap(), Some(10));
        assert_eq!(kv.take::<String>("name").unwrap().as_deref(), Some("boxes"));
        assert_eq!(kv.take_list::<usize>("skip").unwrap(), Some(vec![2, 4]));
        assert_eq!(kv.take_list::<usize>("empty").unwrap(), Some(vec![]));
        assert_eq!(kv.take_or("missing", 3.5).unwrap(), 3.5);
        kv.finish().unwrap();
    }

    #[test]
    fn unknown_key_is_named() {
        let mut kv = KeyValues::parse("epochs = 1\nepohcs = 2\n").unwrap();
        kv.take::<usize>("epochs").unwrap();
        let err = kv.finish().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("epohcs"));
    }

    #[test]
    fn malformed_lines() {
        assert!(KeyValues::parse("epochs 10").is_err());
        assert!(KeyValues::parse("a = 1\na = 2")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(KeyValues::parse("bad key = 1").is_err());
        let mut kv = KeyValues::parse("epochs = ten").unwrap();
        assert!(kv.take::<usize>("epochs").unwrap_err().to_string().contains("line 1"));
    }
}
