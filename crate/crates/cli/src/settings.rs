//! Run settings: the `key = value` config file, environment override and
//! per-graph parameter defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use pebbling::graph::Graph;
use pebbling::milp::Variant;

pub const SOLVER_ENV: &str = "PEBBLE_SOLVER_CMD";
pub const DEFAULT_ELL: u32 = 16;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    pub solver_cmd: Option<String>,
    pub threads: Option<usize>,
    pub budget: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", i + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "solver_cmd" => cfg.solver_cmd = Some(value.to_string()),
                "threads" => cfg.threads = Some(value.parse().with_context(|| format!("config line {}: threads", i + 1))?),
                "budget" => cfg.budget = Some(value.parse().with_context(|| format!("config line {}: budget", i + 1))?),
                _ => bail!("config line {}: unknown key `{key}`", i + 1),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Solver template from, in order of precedence: the command line, the
    /// environment, the config file. Empty strings count as unset.
    pub fn solver_cmd(&self, flag: Option<&str>) -> Option<String> {
        let env = std::env::var(SOLVER_ENV).ok();
        [flag.map(str::to_string), env, self.solver_cmd.clone()]
            .into_iter()
            .flatten()
            .find(|s| !s.trim().is_empty())
    }
}

/// Variant used when none is requested: the symmetric model for a
/// Cartesian square with a diagonal root, the plain model otherwise.
pub fn default_variant(g: &Graph, root: usize) -> Variant {
    match g.mirror_map() {
        Ok(m) if m[root] == root => Variant::Sts,
        _ => Variant::Ts,
    }
}

/// Strategy count used when none is requested: 6 for B4, 10 for the
/// symmetric model on L□L, 8 otherwise.
pub fn default_t(g: &Graph, variant: Variant) -> usize {
    match (g.name(), variant) {
        ("bruhat4", _) => 6,
        ("lemke_square" | "lemke*lemke", Variant::Sts) => 10,
        _ => 8,
    }
}
