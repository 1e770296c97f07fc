//! Brute-force pebbling oracle: solvability by memoised search, maximum
//! unsolvable configurations by level-wise enumeration, and exact rooted
//! pebbling numbers for desk-scale graphs.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::config::{ConfigError, Configuration};
use crate::graph::{Graph, GraphError};
use crate::par::{self, Execution};

/// Default limit on visited search states per top-level query.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("an unsolvable configuration of size {cap} exists; the size cap is too small and the search is inconclusive")]
    CapExceeded { cap: u32 },
    #[error("search budget of {budget} visited states exhausted; the search is inconclusive")]
    BudgetExceeded { budget: u64 },
    #[error("pebble count above 255 on a single vertex is outside the oracle's range")]
    CountOverflow,
}

impl OracleError {
    /// True for the honest "too big for desk scale" refusals.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, OracleError::CapExceeded { .. } | OracleError::BudgetExceeded { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest configuration size examined; `None` means `2^ecc(G,r) + n`.
    pub size_cap: Option<u32>,
    pub budget: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { size_cap: None, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub root: usize,
    pub max_unsolvable_size: u32,
    /// Lexicographically greatest unsolvable configuration of maximum size.
    pub witness: Configuration,
    pub rooted_pebbling_number: u32,
}

type State = Box<[u8]>;

/// Per-query solver state. The memo table lives and dies with one query.
struct Search<'g> {
    g: &'g Graph,
    root: usize,
    dist: Vec<usize>,
    /// `2^(ecc - dist(v))`, so a state is hopeless when `Σ c(v)·scale(v) < 2^ecc`.
    scale: Vec<u128>,
    target: u128,
    /// Pebbling moves `(from, to)`, root-directed first.
    moves: Vec<(usize, usize)>,
    memo: HashMap<State, bool>,
    visited: u64,
    budget: u64,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, root: usize, budget: u64) -> Result<Self, OracleError> {
        g.require_connected()?;
        let dist = g.distances_from(root)?;
        let ecc = dist.iter().copied().max().unwrap_or(0);
        if ecc > 100 {
            return Err(OracleError::CountOverflow);
        }
        let scale = dist.iter().map(|&d| 1u128 << (ecc - d)).collect();
        let mut moves: Vec<(usize, usize)> =
            (0..g.len()).flat_map(|v| g.neighbors(v).iter().map(move |&u| (v, u))).collect();
        moves.sort_by_key(|&(v, u)| (dist[u] as i64 - dist[v] as i64, dist[v], v, u));
        Ok(Search { g, root, dist, scale, target: 1u128 << ecc, moves, memo: HashMap::new(), visited: 0, budget })
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.visited += 1;
        if self.visited > self.budget {
            Err(OracleError::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    fn solvable(&mut self, state: &mut [u8]) -> Result<bool, OracleError> {
        if state[self.root] > 0 {
            return Ok(true);
        }
        // One vertex alone can walk 2^dist pebbles down a shortest path.
        if state.iter().zip(&self.dist).any(|(&c, &d)| d < 8 && c as usize >= 1 << d) {
            return Ok(true);
        }
        let potential: u128 = state.iter().zip(&self.scale).map(|(&c, &s)| c as u128 * s).sum();
        if potential < self.target {
            return Ok(false);
        }
        if let Some(&known) = self.memo.get(&*state) {
            return Ok(known);
        }
        self.tick()?;
        let mut found = false;
        for i in 0..self.moves.len() {
            let (from, to) = self.moves[i];
            if state[from] < 2 {
                continue;
            }
            if state[to] == u8::MAX {
                return Err(OracleError::CountOverflow);
            }
            state[from] -= 2;
            state[to] += 1;
            let ok = self.solvable(state);
            state[from] += 2;
            state[to] -= 1;
            if ok? {
                found = true;
                break;
            }
        }
        self.memo.insert(state.into(), found);
        Ok(found)
    }

    fn to_state(&self, c: &Configuration) -> Result<Vec<u8>, OracleError> {
        c.check_graph(self.g)?;
        c.counts().iter().map(|&x| u8::try_from(x).map_err(|_| OracleError::CountOverflow)).collect()
    }
}

/// Whether some sequence of pebbling moves puts a pebble on `root`.
pub fn is_solvable(g: &Graph, root: usize, c: &Configuration) -> Result<bool, OracleError> {
    let mut search = Search::new(g, root, DEFAULT_BUDGET)?;
    if c.get(root) > 0 {
        return Ok(true);
    }
    let dist = &search.dist;
    if c.counts().iter().zip(dist).any(|(&x, &d)| d < 32 && x as u64 >= 1u64 << d) {
        return Ok(true);
    }
    let mut state = search.to_state(c)?;
    search.solvable(&mut state)
}

/// Outcome of a level-wise enumeration of root-unsolvable configurations.
#[derive(Debug, Clone)]
pub struct UnsolvableLevels {
    pub root: usize,
    /// `levels[k]` holds every unsolvable configuration of size `k`, in
    /// non-increasing lexicographic order.
    pub levels: Vec<Vec<Configuration>>,
}

impl UnsolvableLevels {
    pub fn max_size(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn all(&self) -> impl Iterator<Item = &Configuration> {
        self.levels.iter().flatten()
    }
}

/// Enumerates unsolvable configurations by increasing size. A configuration
/// of size `k` is only tested when every way of removing one pebble leaves
/// an unsolvable configuration (unsolvability is closed downward), and the
/// search stops at the first size with no unsolvable configuration.
fn search_levels(
    g: &Graph,
    root: usize,
    opts: OracleOptions,
    keep_all: bool,
) -> Result<(Vec<Vec<State>>, u32), OracleError> {
    let mut search = Search::new(g, root, opts.budget)?;
    let n = g.len();
    let ecc = search.dist.iter().copied().max().unwrap_or(0) as u32;
    let cap = opts.size_cap.unwrap_or_else(|| (1u32 << ecc.min(30)).saturating_add(n as u32));
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();

    let mut kept: Vec<Vec<State>> = Vec::new();
    let mut prev: HashSet<State> = HashSet::from([vec![0u8; n].into_boxed_slice()]);
    let mut prev_sorted: Vec<State> = prev.iter().cloned().collect();
    for k in 1..=cap {
        let mut next: HashSet<State> = HashSet::new();
        let mut seen: HashSet<State> = HashSet::new();
        for base in &prev_sorted {
            for &v in &others {
                if base[v] == u8::MAX {
                    return Err(OracleError::CountOverflow);
                }
                let mut cand = base.to_vec();
                cand[v] += 1;
                if seen.contains(cand.as_slice()) {
                    continue;
                }
                seen.insert(cand.clone().into_boxed_slice());
                search.tick()?;
                let closed = others.iter().all(|&u| {
                    if cand[u] == 0 {
                        return true;
                    }
                    cand[u] -= 1;
                    let hit = prev.contains(cand.as_slice());
                    cand[u] += 1;
                    hit
                });
                if closed && !search.solvable(&mut cand)? {
                    next.insert(cand.into_boxed_slice());
                }
            }
        }
        let mut sorted: Vec<State> = prev.into_iter().collect();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if next.is_empty() {
            kept.push(sorted);
            return Ok((kept, k - 1));
        }
        if keep_all {
            kept.push(sorted);
        }
        prev_sorted = next.iter().cloned().collect();
        prev = next;
    }
    Err(OracleError::CapExceeded { cap })
}

fn to_config(s: &State) -> Configuration {
    Configuration::from_counts(s.iter().map(|&c| c as u32).collect())
}

/// Largest unsolvable configuration size for `root`, with witness.
pub fn max_unsolvable(g: &Graph, root: usize, opts: OracleOptions) -> Result<OracleReport, OracleError> {
    let (levels, max) = search_levels(g, root, opts, false)?;
    let top = levels.last().and_then(|l| l.first()).expect("level zero is always unsolvable");
    Ok(OracleReport { root, max_unsolvable_size: max, witness: to_config(top), rooted_pebbling_number: max + 1 })
}

/// Every unsolvable configuration for `root`, grouped by size.
pub fn unsolvable_levels(g: &Graph, root: usize, opts: OracleOptions) -> Result<UnsolvableLevels, OracleError> {
    let (levels, _) = search_levels(g, root, opts, true)?;
    let levels = levels.iter().map(|l| l.iter().map(to_config).collect()).collect();
    Ok(UnsolvableLevels { root, levels })
}

/// `π(G, r)` with default options.
pub fn rooted_pebbling_number(g: &Graph, root: usize) -> Result<u32, OracleError> {
    Ok(max_unsolvable(g, root, OracleOptions::default())?.rooted_pebbling_number)
}

/// One report per root, in vertex order.
pub fn all_roots(g: &Graph, opts: OracleOptions, exec: Execution) -> Result<Vec<OracleReport>, OracleError> {
    g.require_connected()?;
    let roots: Vec<usize> = (0..g.len()).collect();
    par::map(exec, &roots, |&r| max_unsolvable(g, r, opts)).into_iter().collect()
}

/// `π(G) = max_r π(G, r)`.
pub fn pebbling_number(g: &Graph) -> Result<u32, OracleError> {
    pebbling_number_with(g, OracleOptions::default(), Execution::default())
}

pub fn pebbling_number_with(g: &Graph, opts: OracleOptions, exec: Execution) -> Result<u32, OracleError> {
    Ok(all_roots(g, opts, exec)?.iter().map(|r| r.rooted_pebbling_number).max().unwrap_or(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn p3_rooted_at_end() -> (Graph, usize) {
        // a - b - r
        let g = Graph::new("p3", ["a", "b", "r"], [("a", "b"), ("b", "r")]).unwrap();
        (g, 2)
    }

    /// Independent reference: plain exhaustive search without pruning or memo.
    fn naive_solvable(g: &Graph, r: usize, c: &mut Vec<u32>) -> bool {
        if c[r] > 0 {
            return true;
        }
        for v in 0..g.len() {
            if c[v] >= 2 {
                for &u in g.neighbors(v) {
                    c[v] -= 2;
                    c[u] += 1;
                    let ok = naive_solvable(g, r, c);
                    c[v] += 2;
                    c[u] -= 1;
                    if ok {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        (0..=total)
            .flat_map(|first| {
                compositions(n - 1, total - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn root_pebble_is_solvable() {
        let (g, r) = p3_rooted_at_end();
        let c = Configuration::from_labels(&g, [("r", 1)]).unwrap();
        assert!(is_solvable(&g, r, &c).unwrap());
    }

    #[test]
    fn p3_three_versus_four_far_pebbles() {
        let (g, r) = p3_rooted_at_end();
        let three = Configuration::from_labels(&g, [("a", 3)]).unwrap();
        let four = Configuration::from_labels(&g, [("a", 4)]).unwrap();
        assert!(!is_solvable(&g, r, &three).unwrap());
        assert!(is_solvable(&g, r, &four).unwrap());
    }

    #[test]
    fn p3_endpoint_brute_force_matches() {
        // Oracle value for π(P3, end) = 4 is derived from exhaustive moves over sizes 3 and 4.
        let (g, r) = p3_rooted_at_end();
        for size in [3u32, 4] {
            let any_unsolvable = compositions(3, size)
                .into_iter()
                .filter(|c| c[r] == 0)
                .any(|mut c| !naive_solvable(&g, r, &mut c));
            assert_eq!(any_unsolvable, size == 3);
        }
        let rep = max_unsolvable(&g, r, OracleOptions::default()).unwrap();
        assert_eq!(rep.rooted_pebbling_number, 4);
        assert_eq!(rep.max_unsolvable_size, 3);
        assert_eq!(rep.witness.counts(), &[3, 0, 0]);
    }

    #[test]
    fn k2_pebbling() {
        let g = catalog("complete_2").unwrap();
        let rep = max_unsolvable(&g, 0, OracleOptions::default()).unwrap();
        assert_eq!((rep.max_unsolvable_size, rep.rooted_pebbling_number), (1, 2));
        assert_eq!(rep.witness.counts(), &[0, 1]);
    }

    #[test]
    fn families() {
        assert_eq!(pebbling_number(&catalog("complete_4").unwrap()).unwrap(), 4);
        assert_eq!(pebbling_number(&catalog("path_4").unwrap()).unwrap(), 8);
        assert_eq!(pebbling_number(&catalog("cycle_5").unwrap()).unwrap(), 5);
        let c6 = catalog("cycle_6").unwrap();
        assert_eq!(rooted_pebbling_number(&c6, 0).unwrap(), 8);
        assert_eq!(pebbling_number(&catalog("hypercube_1").unwrap()).unwrap(), 2);
        assert_eq!(pebbling_number(&catalog("complete_1").unwrap()).unwrap(), 1);
    }

    #[test]
    fn matches_naive_search_on_small_graphs() {
        for key in ["path_4", "cycle_5", "complete_3"] {
            let g = catalog(key).unwrap();
            for r in 0..g.len() {
                let pi = rooted_pebbling_number(&g, r).unwrap();
                for size in [pi - 1, pi] {
                    let any_unsolvable = compositions(g.len(), size)
                        .into_iter()
                        .filter(|c| c[r] == 0)
                        .any(|mut c| !naive_solvable(&g, r, &mut c));
                    assert_eq!(any_unsolvable, size == pi - 1, "{key} root {r} size {size}");
                }
            }
        }
    }

    #[test]
    fn levels_agree_with_is_solvable() {
        let g = catalog("cycle_5").unwrap();
        let levels = unsolvable_levels(&g, 0, OracleOptions::default()).unwrap();
        assert_eq!(levels.max_size(), 4);
        for c in levels.all() {
            assert!(!is_solvable(&g, 0, c).unwrap());
        }
        let total: usize = compositions(5, 4).into_iter().filter(|c| c[0] == 0).filter(|c| {
            !is_solvable(&g, 0, &Configuration::from_counts(c.clone())).unwrap()
        }).count();
        assert_eq!(levels.levels[4].len(), total);
    }

    #[test]
    fn cap_and_budget_are_reported() {
        let g = catalog("path_4").unwrap();
        let small_cap = OracleOptions { size_cap: Some(3), ..Default::default() };
        assert_eq!(max_unsolvable(&g, 0, small_cap), Err(OracleError::CapExceeded { cap: 3 }));
        let tiny = OracleOptions { budget: 5, ..Default::default() };
        assert_eq!(max_unsolvable(&g, 0, tiny), Err(OracleError::BudgetExceeded { budget: 5 }));
    }

    #[test]
    fn disconnected_and_unknown_inputs() {
        let g = Graph::new("x", ["a", "b", "c"], [("a", "b")]).unwrap();
        assert!(matches!(rooted_pebbling_number(&g, 0), Err(OracleError::Graph(GraphError::Disconnected(_)))));
        let p3 = catalog("path_3").unwrap();
        let wrong = Configuration::empty(2);
        assert!(matches!(is_solvable(&p3, 0, &wrong), Err(OracleError::Config(_))));
    }

    #[test]
    fn sequential_and_parallel_reports_identical() {
        let g = catalog("lemke").unwrap();
        let a = all_roots(&g, OracleOptions::default(), Execution::Sequential).unwrap();
        let b = all_roots(&g, OracleOptions::default(), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
