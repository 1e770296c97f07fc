//! Tree strategies: a rooted subtree of the graph with dyadic weights that
//! at least double toward the root.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::config::Configuration;
use crate::dyadic::DyadicRational;
use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex `{0}` is given two parents")]
    DuplicateChild(String),
    #[error("root `{0}` cannot be a child")]
    RootAsChild(String),
    #[error("root `{0}` is not on the diagonal")]
    OffDiagonalRoot(String),
    #[error("configuration has {got} entries, graph has {expected} vertices")]
    ConfigLength { expected: usize, got: usize },
}

/// One reason a strategy fails validation. Labels are stored so a violation
/// can be printed without the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingEdge { parent: String, child: String },
    NotRooted { vertex: String },
    RootWithoutChild,
    Doubling { parent: String, child: String, parent_weight: DyadicRational, child_weight: DyadicRational },
    NonPositiveWeight { vertex: String },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::MissingEdge { .. } => "edge",
            Violation::NotRooted { .. } => "tree",
            Violation::RootWithoutChild => "root-child",
            Violation::Doubling { .. } => "doubling",
            Violation::NonPositiveWeight { .. } => "weight",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingEdge { parent, child } => write!(f, "edge: {parent}-{child} is not an edge of the graph"),
            Violation::NotRooted { vertex } => write!(f, "tree: `{vertex}` does not reach the root"),
            Violation::RootWithoutChild => write!(f, "root-child: root has no child"),
            Violation::Doubling { parent, child, parent_weight, child_weight } => write!(
                f,
                "doubling: w({parent}) = {parent_weight} < 2 * w({child}) = 2 * {child_weight}"
            ),
            Violation::NonPositiveWeight { vertex } => write!(f, "weight: `{vertex}` has weight 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A weighted tree rooted at `root`. `parent[v]` is set exactly for the tree
/// vertices other than the root; `weight[v]` is zero off the tree and at the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStrategy {
    graph: Arc<Graph>,
    root: usize,
    parent: Vec<Option<usize>>,
    weight: Vec<DyadicRational>,
}

impl TreeStrategy {
    pub fn new(graph: Arc<Graph>, root: usize) -> Self {
        let n = graph.len();
        TreeStrategy { graph, root, parent: vec![None; n], weight: vec![DyadicRational::zero(); n] }
    }

    /// Builds a strategy from `(parent, child, weight)` triples. Structural
    /// defects that validation reports (missing edges, cycles, bad weights)
    /// are accepted here; only unrepresentable input is an error.
    pub fn from_edges(
        graph: Arc<Graph>,
        root: usize,
        edges: impl IntoIterator<Item = (usize, usize, DyadicRational)>,
    ) -> Result<Self, StrategyError> {
        let mut s = TreeStrategy::new(graph, root);
        for (p, c, w) in edges {
            s.attach(p, c, w)?;
        }
        Ok(s)
    }

    pub fn from_labels<'a>(
        graph: Arc<Graph>,
        root: &str,
        edges: impl IntoIterator<Item = (&'a str, &'a str, DyadicRational)>,
    ) -> Result<Self, StrategyError> {
        let r = graph.require_vertex(root)?;
        let mut s = TreeStrategy::new(graph, r);
        for (p, c, w) in edges {
            let p = s.graph.require_vertex(p)?;
            let c = s.graph.require_vertex(c)?;
            s.attach(p, c, w)?;
        }
        Ok(s)
    }

    /// Adds `child` under `parent` with the given weight.
    pub fn attach(&mut self, parent: usize, child: usize, weight: DyadicRational) -> Result<(), StrategyError> {
        let label = |v: usize| self.graph.label(v).to_string();
        if child == self.root {
            return Err(StrategyError::RootAsChild(label(child)));
        }
        if self.parent[child].is_some() {
            return Err(StrategyError::DuplicateChild(label(child)));
        }
        self.parent[child] = Some(parent);
        self.weight[child] = weight;
        Ok(())
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn weight(&self, v: usize) -> &DyadicRational {
        &self.weight[v]
    }

    pub fn weights(&self) -> &[DyadicRational] {
        &self.weight
    }

    pub fn in_tree(&self, v: usize) -> bool {
        v == self.root || self.parent[v].is_some()
    }

    /// Number of tree vertices, root included.
    pub fn size(&self) -> usize {
        1 + self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// `w·1`, the sum of all weights.
    pub fn total_weight(&self) -> DyadicRational {
        self.weight.iter().sum()
    }

    /// Tree arcs `(parent, child, weight)` in breadth-first order from the
    /// root, children in vertex order; arcs unreachable from the root follow
    /// in vertex order.
    pub fn arcs(&self) -> Vec<(usize, usize, &DyadicRational)> {
        let n = self.graph.len();
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if let Some(p) = self.parent[v] {
                if p < n {
                    children[p].push(v);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                if !seen[c] {
                    seen[c] = true;
                    out.push((u, c, &self.weight[c]));
                    queue.push_back(c);
                }
            }
        }
        for v in 0..n {
            if let (Some(p), false) = (self.parent[v], seen[v]) {
                out.push((p, v, &self.weight[v]));
            }
        }
        out
    }
}

/// Checks, in order: tree arcs are graph edges; every tree vertex reaches the
/// root; the root has a child; weights double toward the root except on
/// children of the root; tree weights are positive.
pub fn validate_strategy(s: &TreeStrategy) -> Verdict {
    let g = &s.graph;
    let n = g.len();
    let label = |v: usize| g.label(v).to_string();
    let mut violations = Vec::new();

    for v in 0..n {
        if let Some(p) = s.parent[v] {
            if !g.has_edge(p, v) {
                violations.push(Violation::MissingEdge { parent: label(p), child: label(v) });
            }
        }
    }

    // A vertex is rooted when its parent chain ends at the root within n steps.
    let mut state = vec![0u8; n]; // 0 unknown, 1 rooted, 2 not rooted
    state[s.root] = 1;
    for v in 0..n {
        if s.parent[v].is_none() || state[v] != 0 {
            continue;
        }
        let mut chain = vec![v];
        let mut cur = v;
        let verdict = loop {
            match s.parent[cur] {
                None => break if cur == s.root { 1 } else { 2 },
                Some(p) => {
                    if state[p] != 0 {
                        break state[p];
                    }
                    if chain.len() > n || chain.contains(&p) {
                        break 2;
                    }
                    chain.push(p);
                    cur = p;
                }
            }
        };
        for c in chain {
            state[c] = verdict;
        }
    }
    for v in 0..n {
        if s.parent[v].is_some() && state[v] == 2 {
            violations.push(Violation::NotRooted { vertex: label(v) });
        }
    }

    if !s.parent.contains(&Some(s.root)) {
        violations.push(Violation::RootWithoutChild);
    }

    for v in 0..n {
        if let Some(p) = s.parent[v] {
            if p != s.root && s.weight[p] < s.weight[v].double() {
                violations.push(Violation::Doubling {
                    parent: label(p),
                    child: label(v),
                    parent_weight: s.weight[p].clone(),
                    child_weight: s.weight[v].clone(),
                });
            }
        }
    }

    for v in 0..n {
        if s.parent[v].is_some() && s.weight[v].is_zero() {
            violations.push(Violation::NonPositiveWeight { vertex: label(v) });
        }
    }

    Verdict { violations }
}

/// Weight function inequality `w·C <= w·1`, exactly.
pub fn wfl_holds(s: &TreeStrategy, c: &Configuration) -> Result<bool, StrategyError> {
    if c.len() != s.graph.len() {
        return Err(StrategyError::ConfigLength { expected: s.graph.len(), got: c.len() });
    }
    let wc: DyadicRational = s.weight.iter().enumerate().map(|(v, w)| w.mul_int(c.get(v) as u64)).sum();
    Ok(wc <= s.total_weight())
}

/// Coordinate-swapped copy of a strategy on a Cartesian square `G□G`.
pub fn symmetric_mirror(s: &TreeStrategy) -> Result<TreeStrategy, StrategyError> {
    let map = s.graph.mirror_map()?;
    Ok(mirror_with(s, &map))
}

fn mirror_with(s: &TreeStrategy, map: &[usize]) -> TreeStrategy {
    let mut m = TreeStrategy::new(Arc::clone(&s.graph), map[s.root]);
    for v in 0..map.len() {
        m.parent[map[v]] = s.parent[v].map(|p| map[p]);
        m.weight[map[v]] = s.weight[v].clone();
    }
    m
}

/// Appends the mirror of every strategy, in order. The root must be a
/// diagonal vertex `(r,r)` so that each mirror shares it.
pub fn expand_symmetric(strategies: &[TreeStrategy]) -> Result<Vec<TreeStrategy>, StrategyError> {
    let Some(first) = strategies.first() else {
        return Ok(Vec::new());
    };
    let map = first.graph.mirror_map()?;
    let mut out = strategies.to_vec();
    for s in strategies {
        if map[s.root] != s.root {
            return Err(StrategyError::OffDiagonalRoot(s.graph.label(s.root).to_string()));
        }
        let map = if Arc::ptr_eq(&s.graph, &first.graph) { map.clone() } else { s.graph.mirror_map()? };
        out.push(mirror_with(s, &map));
    }
    Ok(out)
}
