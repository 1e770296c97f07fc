//! Property sweeps that compare certificates with the brute-force oracle:
//! soundness of both bounds and the weight function inequality.
//! Work items run through [`crate::par::map`].

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cert::{covering_bound, lp_relaxation_bound, CertError};
use crate::config::Configuration;
use crate::graph::Graph;
use crate::heuristic::{heuristic_generate, random_strategy, HeuristicError};
use crate::milp::{ModelParams, Variant};
use crate::oracle::{self, OracleError, OracleOptions};
use crate::par::{self, Execution};
use crate::strategy::{validate_strategy, wfl_holds, StrategyError, TreeStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("generated strategy failed validation")]
    InvalidGenerated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessCase {
    pub root: usize,
    pub t: usize,
    pub ell: u32,
    pub seed: u64,
    pub pi: u32,
    pub covering: u64,
    pub lp: u64,
}

impl SoundnessCase {
    /// `π <= lp <= covering`.
    pub fn holds(&self) -> bool {
        let pi = self.pi as u64;
        pi <= self.lp && self.lp <= self.covering
    }
}

/// Parameters of the `i`-th heuristic bundle in a sweep: T cycles through
/// 1..=4 and ell through 1..=4, the seed is `i`.
pub fn sweep_params(i: usize) -> (usize, u32, u64) {
    (1 + i % 4, 1 + ((i / 4) % 4) as u32, i as u64)
}

/// `per_root` heuristic bundles for every root, each bounded both ways and
/// compared with `pis[root]`. Results are in (root, bundle) order.
pub fn soundness_cases(
    g: &Arc<Graph>,
    pis: &[u32],
    per_root: usize,
    exec: Execution,
) -> Result<Vec<SoundnessCase>, SweepError> {
    let items: Vec<(usize, usize)> = (0..g.len()).flat_map(|r| (0..per_root).map(move |i| (r, i))).collect();
    par::map(exec, &items, |&(root, i)| {
        let (t, ell, seed) = sweep_params(i);
        let p = ModelParams::new(t, ell, Variant::Ts).expect("static parameters are valid");
        let bundle = heuristic_generate(Arc::clone(g), root, p, seed)?;
        let covering = covering_bound(&bundle)?.bound;
        let lp = lp_relaxation_bound(&bundle)?.bound;
        Ok(SoundnessCase { root, t, ell, seed, pi: pis[root], covering, lp })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WflViolation {
    pub root: usize,
    pub strategy: TreeStrategy,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WflReport {
    pub strategies: usize,
    pub unsolvable: usize,
    pub checks: u64,
    pub violations: Vec<WflViolation>,
}

/// Strategies used by the WFL sweep for one root: every tree of a few
/// heuristic bundles plus `random` random strategies.
fn wfl_strategies(g: &Arc<Graph>, root: usize, random: usize, seed: u64) -> Result<Vec<TreeStrategy>, SweepError> {
    let mut out = Vec::new();
    for i in 0..4 {
        let (t, ell, s) = sweep_params(i * 5 + 3);
        let p = ModelParams::new(t, ell, Variant::Ts).expect("static parameters are valid");
        out.extend(heuristic_generate(Arc::clone(g), root, p, s ^ seed)?.strategies().iter().cloned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(root as u64));
    for _ in 0..random {
        out.push(random_strategy(Arc::clone(g), root, &mut rng)?);
    }
    if out.iter().any(|s| !validate_strategy(s).is_ok()) {
        return Err(SweepError::InvalidGenerated);
    }
    Ok(out)
}

/// Checks `w·C <= w·1` for every generated strategy against every
/// unsolvable configuration of every root.
pub fn wfl_sweep(g: &Arc<Graph>, random: usize, seed: u64, exec: Execution) -> Result<WflReport, SweepError> {
    let roots: Vec<usize> = (0..g.len()).collect();
    let parts = par::map(exec, &roots, |&root| -> Result<WflReport, SweepError> {
        let levels = oracle::unsolvable_levels(g, root, OracleOptions::default())?;
        let strategies = wfl_strategies(g, root, random, seed)?;
        let mut report = WflReport { strategies: strategies.len(), ..Default::default() };
        for c in levels.all() {
            report.unsolvable += 1;
            for s in &strategies {
                report.checks += 1;
                if !wfl_holds(s, c)? {
                    report.violations.push(WflViolation { root, strategy: s.clone(), config: c.clone() });
                }
            }
        }
        Ok(report)
    });
    let mut total = WflReport::default();
    for part in parts {
        let part = part?;
        total.strategies += part.strategies;
        total.unsolvable += part.unsolvable;
        total.checks += part.checks;
        total.violations.extend(part.violations);
    }
    Ok(total)
}
