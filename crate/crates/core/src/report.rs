//! Command output: free-form text for people, and a TOML key-value block
//! that parses back into the same record.
//!
//! Structured schema:
//!
//! ```toml
//! command = "check"          # subcommand that produced the record
//! subject = "two_state.ts"   # input it was run on
//!
//! [fields]                   # sizes, sets and witnesses, keyed by name
//! alpha_forall = "{1,2}"
//! trace_count = 312
//!
//! [[verdicts]]               # one per decided question
//! name = "branchable"
//! holds = false
//! detail = "state-only states {1}"
//! ```
//!
//! Field values are booleans, integers, strings or lists of strings.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Text(String),
    List(Vec<String>),
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<Vec<String>> for Value {
    fn from(v: Vec<String>) -> Self {
        Value::List(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    #[serde(default)]
    pub detail: String,
}

/// The machine-readable part of a report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub subject: String,
    #[serde(default)]
    pub fields: BTreeMap<String, Value>,
    #[serde(default)]
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Error)]
#[error("malformed structured report: {0}")]
pub struct ReportParseError(#[from] toml::de::Error);

impl Record {
    pub fn to_structured(&self) -> String {
        toml::to_string(self).expect("records serialize")
    }

    pub fn parse(text: &str) -> Result<Record, ReportParseError> {
        Ok(toml::from_str(text)?)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub text: Vec<String>,
    pub record: Record,
}

impl Report {
    pub fn new(command: &str, subject: impl Into<String>) -> Self {
        Report {
            text: Vec::new(),
            record: Record {
                command: command.into(),
                subject: subject.into(),
                ..Default::default()
            },
        }
    }

    pub fn line(&mut self, text: impl Into<String>) -> &mut Self {
        self.text.push(text.into());
        self
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.record.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn verdict(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> &mut Self {
        self.record.verdicts.push(Verdict {
            name: name.into(),
            holds,
            detail: detail.into(),
        });
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_string(),
            Format::Structured => self.record.to_structured(),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.text {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
