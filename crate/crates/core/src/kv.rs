//! Line-oriented `key = value` documents used for model files and
//! machine-readable reports.

use std::collections::HashMap;
use std::fmt::Display;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum KvError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("duplicate key {0:?}")]
    Duplicate(String),
    #[error("missing key {0:?}")]
    Missing(String),
    #[error("key {key:?}: cannot parse {value:?}")]
    Value { key: String, value: String },
}

/// Ordered key/value pairs; comment lines start with `#`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDocument {
    entries: Vec<(String, String)>,
    index: HashMap<String, usize>,
}

impl KvDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        let key = key.into();
        self.index.insert(key.clone(), self.entries.len());
        self.entries.push((key, value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.index.get(key).map(|&i| self.entries[i].1.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, KvError> {
        self.get(key).ok_or_else(|| KvError::Missing(key.to_string()))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<T, KvError> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| KvError::Value {
            key: key.to_string(),
            value: raw.to_string(),
        })
    }

    /// Comma-separated list; an empty value is an empty list.
    pub fn parse_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, KvError> {
        let raw = self.require(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|item| {
                item.trim().parse().map_err(|_| KvError::Value {
                    key: key.to_string(),
                    value: raw.to_string(),
                })
            })
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self, KvError> {
        let mut doc = KvDocument::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(KvError::Syntax(n + 1))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(KvError::Syntax(n + 1));
            }
            if doc.index.contains_key(key) {
                return Err(KvError::Duplicate(key.to_string()));
            }
            doc.push(key, value.trim());
        }
        Ok(doc)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Comma-joins values with their shortest round-trip representation.
pub fn join<T: Display>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_render() {
        let doc = KvDocument::parse("# c\na = 1\n\nb=x , y\n").unwrap();
        assert_eq!(doc.get("a"), Some("1"));
        assert_eq!(doc.get("b"), Some("x , y"));
        assert_eq!(doc.render(), "a = 1\nb = x , y\n");
        assert_eq!(doc.parse_list::<String>("b").unwrap(), vec!["x", "y"]);
    }

    #[test]
    fn errors() {
        assert_eq!(KvDocument::parse("nope").unwrap_err(), KvError::Syntax(1));
        assert!(matches!(
            KvDocument::parse("a = 1\na = 2").unwrap_err(),
            KvError::Duplicate(_)
        ));
        let doc = KvDocument::parse("a = z").unwrap();
        assert!(doc.parse_value::<f64>("a").is_err());
        assert!(doc.require("b").is_err());
    }
}
