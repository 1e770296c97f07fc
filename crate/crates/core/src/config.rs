//! Pebble configurations and their line-oriented text format.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("configuration has {got} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("configuration text line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Pebble counts indexed by vertex (graph construction order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    counts: Vec<u32>,
}

impl Configuration {
    pub fn empty(n: usize) -> Self {
        Configuration { counts: vec![0; n] }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Configuration { counts }
    }

    /// Builds a configuration from `(label, count)` pairs; omitted vertices hold 0.
    pub fn from_labels<'a>(g: &Graph, pairs: impl IntoIterator<Item = (&'a str, u32)>) -> Result<Self, ConfigError> {
        let mut c = Configuration::empty(g.len());
        for (label, count) in pairs {
            c.counts[g.require_vertex(label)?] += count;
        }
        Ok(c)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, v: usize) -> u32 {
        self.counts[v]
    }

    pub fn set(&mut self, v: usize, count: u32) {
        self.counts[v] = count;
    }

    /// `|C|`, the total number of pebbles.
    pub fn size(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.counts.len() == other.counts.len() && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }

    pub fn check_graph(&self, g: &Graph) -> Result<(), ConfigError> {
        if self.counts.len() == g.len() {
            Ok(())
        } else {
            Err(ConfigError::LengthMismatch { expected: g.len(), got: self.counts.len() })
        }
    }

    /// `config`, one `p <vertex> <count>` line per nonzero vertex, `end`.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::from("config\n");
        for (v, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                let _ = writeln!(out, "p {} {}", g.label(v), c);
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn parse_text(g: &Graph, text: &str) -> Result<Self, ConfigError> {
        let mut c = None;
        let mut done = false;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConfigError::Parse { line: no + 1, msg };
            if done {
                return Err(err("content after `end`".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match (parts.as_slice(), c.as_mut()) {
                (["config"], None) => c = Some(Configuration::empty(g.len())),
                (["p", label, count], Some(cfg)) => {
                    let v = g.vertex(label).ok_or_else(|| err(format!("unknown vertex `{label}`")))?;
                    let n: u32 = count.parse().map_err(|_| err(format!("bad count `{count}`")))?;
                    cfg.counts[v] += n;
                }
                (["end"], Some(_)) => done = true,
                _ => return Err(err(format!("unexpected line `{line}`"))),
            }
        }
        match (c, done) {
            (Some(c), true) => Ok(c),
            _ => Err(ConfigError::Parse { line: text.lines().count(), msg: "incomplete configuration block".into() }),
        }
    }
}
