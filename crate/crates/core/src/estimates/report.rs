use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Default multiplicative slack on every inequality check.
pub const DEFAULT_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContextValue {
    Flag(bool),
    Number(f64),
    Text(String),
}

impl From<f64> for ContextValue {
    fn from(v: f64) -> Self {
        ContextValue::Number(v)
    }
}

impl From<bool> for ContextValue {
    fn from(v: bool) -> Self {
        ContextValue::Flag(v)
    }
}

impl From<&str> for ContextValue {
    fn from(v: &str) -> Self {
        ContextValue::Text(v.to_string())
    }
}

impl From<usize> for ContextValue {
    fn from(v: usize) -> Self {
        ContextValue::Number(v as f64)
    }
}

/// Outcome of one inequality `lhs <= rhs`; passes when `lhs <= rhs (1 + slack)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub context: BTreeMap<String, ContextValue>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let mut context = BTreeMap::new();
        context.insert("slack".to_string(), ContextValue::Number(slack));
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs * (1.0 + slack),
            context,
        }
    }

    /// A check whose quantity is undefined for the given input (e.g. a ratio
    /// of two zero norms). Recorded as passing with a `degenerate` flag.
    pub fn degenerate(name: impl Into<String>, rhs: f64, slack: f64, why: &str) -> Self {
        CheckReport::new(name, 0.0, rhs, slack)
            .with("degenerate", true)
            .with("reason", why)
    }

    pub fn with(mut self, key: &str, value: impl Into<ContextValue>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    pub fn slack(&self) -> f64 {
        match self.context.get("slack") {
            Some(ContextValue::Number(s)) => *s,
            _ => 0.0,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.context.get("degenerate"), Some(ContextValue::Flag(true)))
    }
}
