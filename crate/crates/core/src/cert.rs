//! Certificate bundles and the two bounds they prove: the covering
//! bound `floor(total/K) + 1` and the exact LP-relaxation bound.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::dyadic::DyadicRational;
use crate::graph::Graph;
use crate::lp::{self, LpError};
use crate::strategy::{validate_strategy, Verdict};
use crate::TreeStrategy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("strategy {index} is invalid: {}", .verdict.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidStrategy { index: usize, verdict: Verdict },
    #[error("vertex `{0}` carries no weight in any strategy")]
    Uncovered(String),
    #[error("strategy {index} is rooted at `{got}`, bundle root is `{expected}`")]
    MixedRoots { index: usize, expected: String, got: String },
    #[error("strategy {0} lives on a different graph")]
    MixedGraphs(usize),
    #[error("graph has no vertex other than the root")]
    NoTargets,
    #[error("bound does not fit in 64 bits")]
    Overflow,
    #[error("LP relaxation: {0}")]
    Lp(#[from] LpError),
    #[error("LP dual solution failed its optimality check")]
    DualCheckFailed,
}

/// Strategies sharing one graph and root, combined with unit coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateBundle {
    graph: Arc<Graph>,
    root: usize,
    strategies: Vec<TreeStrategy>,
}

impl CertificateBundle {
    pub fn new(graph: Arc<Graph>, root: usize, strategies: Vec<TreeStrategy>) -> Result<Self, CertError> {
        for (i, s) in strategies.iter().enumerate() {
            if !Arc::ptr_eq(s.graph(), &graph) && **s.graph() != *graph {
                return Err(CertError::MixedGraphs(i + 1));
            }
            if s.root() != root {
                return Err(CertError::MixedRoots {
                    index: i + 1,
                    expected: graph.label(root).to_string(),
                    got: graph.label(s.root()).to_string(),
                });
            }
        }
        Ok(CertificateBundle { graph, root, strategies })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn strategies(&self) -> &[TreeStrategy] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Validates every strategy, reporting the first failure.
    pub fn validate(&self) -> Result<(), CertError> {
        for (i, s) in self.strategies.iter().enumerate() {
            let verdict = validate_strategy(s);
            if !verdict.is_ok() {
                return Err(CertError::InvalidStrategy { index: i + 1, verdict });
            }
        }
        Ok(())
    }

    /// `Σ_t w_t(v)` for every vertex; the root entry is zero.
    pub fn per_vertex_sums(&self) -> Vec<DyadicRational> {
        let mut sums = vec![DyadicRational::zero(); self.graph.len()];
        for s in &self.strategies {
            for (v, w) in s.weights().iter().enumerate() {
                if !w.is_zero() {
                    sums[v] += w;
                }
            }
        }
        sums
    }

    fn first_uncovered(&self, sums: &[DyadicRational]) -> Option<usize> {
        (0..self.graph.len()).find(|&v| v != self.root && sums[v].is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub k: DyadicRational,
    pub total_weight: DyadicRational,
    pub bound: u64,
    pub per_vertex_sums: Vec<DyadicRational>,
}

impl CertificateReport {
    /// Vertices whose weight sum equals `K`.
    pub fn minimisers(&self, root: usize) -> Vec<usize> {
        (0..self.per_vertex_sums.len()).filter(|&v| v != root && self.per_vertex_sums[v] == self.k).collect()
    }
}

/// Covering bound of a bundle, in exact arithmetic.
pub fn covering_bound(bundle: &CertificateBundle) -> Result<CertificateReport, CertError> {
    bundle.validate()?;
    let sums = bundle.per_vertex_sums();
    if bundle.graph.len() < 2 {
        return Err(CertError::NoTargets);
    }
    if let Some(v) = bundle.first_uncovered(&sums) {
        return Err(CertError::Uncovered(bundle.graph.label(v).to_string()));
    }
    let k = (0..sums.len()).filter(|&v| v != bundle.root).map(|v| &sums[v]).min().cloned().expect("n >= 2");
    let total: DyadicRational = sums.iter().sum();
    let bound = total.div_floor(&k).to_u64().and_then(|q| q.checked_add(1)).ok_or(CertError::Overflow)?;
    Ok(CertificateReport { k, total_weight: total, bound, per_vertex_sums: sums })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpBound {
    /// Optimum `ẑ` of the relaxation.
    pub z_hat: BigRational,
    pub bound: u64,
    /// Optimal configuration, indexed by vertex (root entry zero).
    pub primal: Vec<BigRational>,
    /// Optimal multipliers, one per strategy.
    pub dual: Vec<BigRational>,
}

/// Exact optimum of `max Σ_{v≠r} C(v)` subject to `w_t·C <= w_t·1`, `C >= 0`.
/// The returned optimum is re-certified against its dual before use.
pub fn lp_relaxation_bound(bundle: &CertificateBundle) -> Result<LpBound, CertError> {
    bundle.validate()?;
    let n = bundle.graph.len();
    if n < 2 {
        return Err(CertError::NoTargets);
    }
    let sums = bundle.per_vertex_sums();
    if let Some(v) = bundle.first_uncovered(&sums) {
        return Err(CertError::Uncovered(bundle.graph.label(v).to_string()));
    }
    let cols: Vec<usize> = (0..n).filter(|&v| v != bundle.root).collect();
    let a: Vec<Vec<BigRational>> =
        bundle.strategies.iter().map(|s| cols.iter().map(|&v| s.weight(v).to_rational()).collect()).collect();
    let b: Vec<BigRational> = bundle.strategies.iter().map(|s| s.total_weight().to_rational()).collect();
    let c = vec![BigRational::from_integer(1.into()); cols.len()];
    let sol = lp::maximize(&a, &b, &c)?;
    if !lp::check_primal(&a, &b, &sol.primal) || !lp::check_dual(&a, &b, &c, &sol.dual, &sol.objective) {
        return Err(CertError::DualCheckFailed);
    }
    let floor: BigInt = sol.objective.floor().to_integer();
    let bound = floor.to_u64().and_then(|q| q.checked_add(1)).ok_or(CertError::Overflow)?;
    let mut primal = vec![BigRational::zero(); n];
    for (j, &v) in cols.iter().enumerate() {
        primal[v] = sol.primal[j].clone();
    }
    Ok(LpBound { z_hat: sol.objective, bound, primal, dual: sol.dual })
}

/// Both bounds of a bundle; `bound` is the smaller, which is what the bundle proves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub covering: CertificateReport,
    pub lp: LpBound,
    pub bound: u64,
}

pub fn certify(bundle: &CertificateBundle) -> Result<Certified, CertError> {
    let covering = covering_bound(bundle)?;
    let lp = lp_relaxation_bound(bundle)?;
    let bound = covering.bound.min(lp.bound);
    Ok(Certified { covering, lp, bound })
}
