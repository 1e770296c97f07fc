//! Solver-free bundles from randomised breadth-first trees.
//!
//! A vertex at depth `d <= ell` gets weight `2^(ell-d)`, so the root's
//! children carry `2^(ell-1)` and the weights halve level by level. Vertices
//! deeper than `ell` are then hung onto the first strategy along a BFS tree,
//! continuing to halve into fractional weights, so every vertex is covered.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cert::{CertError, CertificateBundle};
use crate::dyadic::DyadicRational;
use crate::graph::{Graph, GraphError};
use crate::milp::{ModelParams, Variant};
use crate::strategy::{expand_symmetric, StrategyError, TreeStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// Random BFS parent array: vertices are discovered in shuffled neighbour
/// order, and each vertex picks a uniformly random parent among its
/// neighbours one level closer to the root.
fn random_bfs<R: Rng>(g: &Graph, root: usize, rng: &mut R) -> (Vec<Option<usize>>, Vec<usize>) {
    let n = g.len();
    let mut depth = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    depth[root] = 0;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        let mut next: Vec<usize> = g.neighbors(u).iter().copied().filter(|&v| depth[v] == usize::MAX).collect();
        next.shuffle(rng);
        for v in next {
            depth[v] = depth[u] + 1;
            queue.push_back(v);
        }
    }
    let mut parent = vec![None; n];
    for &v in order.iter().skip(1) {
        let up: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| depth[u] + 1 == depth[v]).collect();
        parent[v] = up.choose(rng).copied();
    }
    (parent, depth)
}

fn level_weight(ell: u32, depth: usize) -> DyadicRational {
    DyadicRational::pow2(ell as i64 - depth as i64)
}

/// `p.t` strategies (or `p.t/2` plus mirrors for the symmetric variant),
/// deterministic in `seed`.
pub fn heuristic_generate(g: Arc<Graph>, root: usize, p: ModelParams, seed: u64) -> Result<CertificateBundle, HeuristicError> {
    if root >= g.len() {
        return Err(GraphError::UnknownVertex(root.to_string()).into());
    }
    g.require_connected()?;
    let depth_cap = p.ell as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strategies = Vec::with_capacity(p.t);
    for k in 0..p.blocks() {
        let (parent, depth) = random_bfs(&g, root, &mut rng);
        let mut s = TreeStrategy::new(Arc::clone(&g), root);
        // Repair coverage on the first strategy only: it keeps every vertex.
        let cap = if k == 0 { usize::MAX } else { depth_cap };
        for v in 0..g.len() {
            if let Some(u) = parent[v] {
                if depth[v] <= cap {
                    s.attach(u, v, level_weight(p.ell, depth[v]))?;
                }
            }
        }
        strategies.push(s);
    }
    if p.variant == Variant::Sts {
        strategies = expand_symmetric(&strategies)?;
    }
    let bundle = CertificateBundle::new(g, root, strategies)?;
    bundle.validate()?;
    Ok(bundle)
}

/// A random valid strategy: a random BFS subtree (each vertex kept with
/// probability about 2/3 once its parent is kept, at least one root child) with
/// random dyadic weights, each at most half its parent's unless the parent is
/// the root. Needs a connected graph with at least two vertices.
pub fn random_strategy<R: Rng>(g: Arc<Graph>, root: usize, rng: &mut R) -> Result<TreeStrategy, HeuristicError> {
    g.require_connected()?;
    if g.len() < 2 {
        return Err(CertError::NoTargets.into());
    }
    let (parent, depth) = random_bfs(&g, root, rng);
    let mut order: Vec<usize> = (0..g.len()).filter(|&v| v != root).collect();
    order.sort_by_key(|&v| depth[v]);
    let forced = order[0];
    let mut weight: Vec<Option<DyadicRational>> = vec![None; g.len()];
    let mut s = TreeStrategy::new(Arc::clone(&g), root);
    for v in order {
        let p = parent[v].expect("connected");
        if v != forced && !rng.gen_ratio(2, 3) {
            continue;
        }
        let w = if p == root {
            DyadicRational::integer(rng.gen_range(1..=64))
        } else {
            let Some(wp) = &weight[p] else { continue };
            let bits = rng.gen_range(0..4u32);
            let num = rng.gen_range(1..=1u64 << bits);
            &wp.halve() * &DyadicRational::new(num, bits)
        };
        weight[v] = Some(w.clone());
        s.attach(p, v, w)?;
    }
    Ok(s)
}
