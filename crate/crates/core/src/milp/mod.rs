//! Mixed-integer models whose feasible points are bundles of tree strategies.
//!
//! Per strategy block `t` the model has a binary `x` per arc (tree arc
//! chosen), a binary `y` per vertex (vertex in tree) and a continuous `z` per
//! vertex (its weight). Rows, in order per block: in-degree equals
//! membership; the root has a tree neighbour; doubling along every arc away
//! from the root (big-M `2^ell`); weight only on tree vertices (at most
//! `2^(ell-1)`); the root is not a tree vertex. Coverage rows across blocks
//! follow all blocks. The symmetric variant builds half the blocks and counts
//! every vertex together with its mirror.

mod lpfile;
mod solution;
mod stats;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

pub use lpfile::{emit_lp, sanitize};
pub use solution::{extract_strategies, parse_solution, Extraction, SolutionAssignment, SolveStatus, Value};
pub use stats::{model_stats, ModelStats, RowCount};

pub const MAX_ELL: u32 = 52;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MilpError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("root `{0}` is not on the diagonal; the symmetric model needs a root (r,r)")]
    OffDiagonalRoot(String),
    #[error("name `{0}` is produced twice after sanitising vertex labels")]
    NameCollision(String),
    #[error("vertex label `{0}` has no alphanumeric characters")]
    EmptyName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    #[default]
    Ts,
    Sts,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Ts => "TS",
            Variant::Sts => "STS",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ts" => Ok(Variant::Ts),
            "sts" => Ok(Variant::Sts),
            _ => Err(format!("unknown variant `{s}` (expected TS or STS)")),
        }
    }
}

/// `t` is the total number of strategies certified; the symmetric variant
/// solves for `t/2` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelParams {
    pub t: usize,
    pub ell: u32,
    pub variant: Variant,
}

impl ModelParams {
    pub fn new(t: usize, ell: u32, variant: Variant) -> Result<Self, MilpError> {
        if t == 0 {
            return Err(MilpError::Params("T must be at least 1".into()));
        }
        if !(1..=MAX_ELL).contains(&ell) {
            return Err(MilpError::Params(format!("ell must be in 1..={MAX_ELL}, got {ell}")));
        }
        if variant == Variant::Sts && !t.is_multiple_of(2) {
            return Err(MilpError::Params(format!("the symmetric model needs an even T, got {t}")));
        }
        Ok(ModelParams { t, ell, variant })
    }

    /// Number of strategy blocks in the model.
    pub fn blocks(&self) -> usize {
        match self.variant {
            Variant::Ts => self.t,
            Variant::Sts => self.t / 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    InDegree,
    RootChild,
    Doubling,
    Link,
    RootExclusion,
    Coverage,
}

impl RowKind {
    pub const ALL: [RowKind; 6] =
        [RowKind::InDegree, RowKind::RootChild, RowKind::Doubling, RowKind::Link, RowKind::RootExclusion, RowKind::Coverage];

    pub fn prefix(self) -> &'static str {
        match self {
            RowKind::InDegree => "indeg",
            RowKind::RootChild => "rootchild",
            RowKind::Doubling => "double",
            RowKind::Link => "link",
            RowKind::RootExclusion => "noroot",
            RowKind::Coverage => "cover",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub kind: RowKind,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

/// Variable indices of one strategy block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// One per arc, in arc order.
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpModel {
    graph: Arc<Graph>,
    root: usize,
    params: ModelParams,
    arcs: Vec<(usize, usize)>,
    names: Vec<String>,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, i64)>,
    blocks: Vec<Block>,
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, i64)] {
        &self.objective
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Sanitised vertex name used inside variable names.
    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn z_upper(&self) -> i64 {
        1i64 << (self.params.ell - 1)
    }
}

struct Builder {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind, lower: i64, upper: i64) -> Result<usize, MilpError> {
        if self.index.contains_key(&name) {
            return Err(MilpError::NameCollision(name));
        }
        let i = self.variables.len();
        self.index.insert(name.clone(), i);
        self.variables.push(Variable { name, kind, lower, upper });
        Ok(i)
    }
}

fn vertex_names(g: &Graph) -> Result<Vec<String>, MilpError> {
    let names: Vec<String> = g.labels().iter().map(|l| sanitize(l)).collect();
    let mut seen = HashMap::new();
    for (v, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(MilpError::EmptyName(g.label(v).to_string()));
        }
        if seen.insert(name.clone(), v).is_some() {
            return Err(MilpError::NameCollision(name.clone()));
        }
    }
    Ok(names)
}

/// The plain tree-strategy model.
pub fn build_ts_model(g: Arc<Graph>, root: usize, params: ModelParams) -> Result<MilpModel, MilpError> {
    if params.variant != Variant::Ts {
        return Err(MilpError::Params("build_ts_model needs variant TS".into()));
    }
    build(g, root, params, None)
}

/// The symmetric model on a Cartesian square `G□G` with diagonal root.
pub fn build_sts_model(g: Arc<Graph>, root: usize, params: ModelParams) -> Result<MilpModel, MilpError> {
    if params.variant != Variant::Sts {
        return Err(MilpError::Params("build_sts_model needs variant STS".into()));
    }
    let mirror = g.mirror_map()?;
    if mirror.get(root) != Some(&root) {
        let label = g.labels().get(root).cloned().unwrap_or_else(|| root.to_string());
        return Err(MilpError::OffDiagonalRoot(label));
    }
    build(g, root, params, Some(mirror))
}

pub fn build_model(g: Arc<Graph>, root: usize, params: ModelParams) -> Result<MilpModel, MilpError> {
    match params.variant {
        Variant::Ts => build_ts_model(g, root, params),
        Variant::Sts => build_sts_model(g, root, params),
    }
}

fn build(g: Arc<Graph>, root: usize, params: ModelParams, mirror: Option<Vec<usize>>) -> Result<MilpModel, MilpError> {
    let n = g.len();
    if root >= n {
        return Err(GraphError::UnknownVertex(root.to_string()).into());
    }
    g.require_connected()?;
    let names = vertex_names(&g)?;
    let arcs = g.bidirect().arcs;
    let big_m = 1i64 << params.ell;
    let z_up = 1i64 << (params.ell - 1);

    let mut b = Builder { variables: Vec::new(), index: HashMap::new() };
    let mut blocks = Vec::with_capacity(params.blocks());
    for t in 1..=params.blocks() {
        let x = arcs
            .iter()
            .map(|&(i, j)| b.var(format!("x_{t}_{}_{}", names[i], names[j]), VarKind::Binary, 0, 1))
            .collect::<Result<Vec<_>, _>>()?;
        let y = (0..n).map(|i| b.var(format!("y_{t}_{}", names[i]), VarKind::Binary, 0, 1)).collect::<Result<Vec<_>, _>>()?;
        let z = (0..n)
            .map(|i| b.var(format!("z_{t}_{}", names[i]), VarKind::Continuous, 0, z_up))
            .collect::<Result<Vec<_>, _>>()?;
        blocks.push(Block { x, y, z });
    }

    let mut constraints = Vec::new();
    let mut row = |kind: RowKind, suffix: String, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64| {
        constraints.push(Constraint { name: format!("{}_{suffix}", kind.prefix()), kind, terms, sense, rhs });
    };
    for (bi, blk) in blocks.iter().enumerate() {
        let t = bi + 1;
        for i in 0..n {
            let mut terms: Vec<(usize, i64)> =
                arcs.iter().enumerate().filter(|(_, &(_, dst))| dst == i).map(|(a, _)| (blk.x[a], 1)).collect();
            terms.push((blk.y[i], -1));
            row(RowKind::InDegree, format!("{t}_{}", names[i]), terms, Sense::Eq, 0);
        }
        let terms = g.neighbors(root).iter().map(|&i| (blk.y[i], 1)).collect();
        row(RowKind::RootChild, t.to_string(), terms, Sense::Ge, 1);
        for (a, &(i, j)) in arcs.iter().enumerate() {
            if i == root || j == root {
                continue;
            }
            let terms = vec![(blk.z[i], 1), (blk.z[j], -2), (blk.x[a], -big_m)];
            row(RowKind::Doubling, format!("{t}_{}_{}", names[i], names[j]), terms, Sense::Ge, -big_m);
        }
        for i in 0..n {
            row(RowKind::Link, format!("{t}_{}", names[i]), vec![(blk.z[i], 1), (blk.y[i], -z_up)], Sense::Le, 0);
        }
        row(RowKind::RootExclusion, t.to_string(), vec![(blk.y[root], 1)], Sense::Eq, 0);
    }

    for i in (0..n).filter(|&i| i != root) {
        let mut terms: Vec<(usize, i64)> = Vec::new();
        for blk in &blocks {
            match &mirror {
                None => terms.push((blk.z[i], 1)),
                Some(m) if m[i] == i => terms.push((blk.z[i], 2)),
                Some(m) => {
                    terms.push((blk.z[i], 1));
                    terms.push((blk.z[m[i]], 1));
                }
            }
        }
        row(RowKind::Coverage, names[i].clone(), terms, Sense::Ge, params.t as i64);
    }

    let coef = if mirror.is_some() { 2 } else { 1 };
    let objective = blocks.iter().flat_map(|blk| blk.z.iter().map(move |&z| (z, coef))).collect();

    Ok(MilpModel {
        graph: g,
        root,
        params,
        arcs,
        names,
        variables: b.variables,
        constraints,
        objective,
        blocks,
        index: b.index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn k2() -> Arc<Graph> {
        Arc::new(Graph::new::<&str, &str, _, _>("k2", ["r", "a"], [("r", "a")]).unwrap())
    }

    #[test]
    fn params_checked() {
        assert!(ModelParams::new(0, 4, Variant::Ts).is_err());
        assert!(ModelParams::new(3, 4, Variant::Sts).is_err());
        assert!(ModelParams::new(2, 0, Variant::Ts).is_err());
        assert!(ModelParams::new(2, 53, Variant::Ts).is_err());
        assert_eq!(ModelParams::new(10, 16, Variant::Sts).unwrap().blocks(), 5);
        assert_eq!("sts".parse::<Variant>().unwrap(), Variant::Sts);
    }

    #[test]
    fn k2_by_hand() {
        let m = build_ts_model(k2(), 0, ModelParams::new(1, 1, Variant::Ts).unwrap()).unwrap();
        let names: Vec<&str> = m.variables().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["x_1_r_a", "x_1_a_r", "y_1_r", "y_1_a", "z_1_r", "z_1_a"]);
        let rows: Vec<&str> = m.constraints().iter().map(|c| c.name.as_str()).collect();
        // Both arcs touch the root, so there is no doubling row.
        assert_eq!(rows, ["indeg_1_r", "indeg_1_a", "rootchild_1", "link_1_r", "link_1_a", "noroot_1", "cover_a"]);
        assert_eq!(m.z_upper(), 1);
    }

    #[test]
    fn row_counts_per_kind() {
        let g = Arc::new(catalog("lemke").unwrap());
        let p = ModelParams::new(3, 4, Variant::Ts).unwrap();
        let m = build_ts_model(g.clone(), 0, p).unwrap();
        let count = |k: RowKind| m.constraints().iter().filter(|c| c.kind == k).count();
        assert_eq!(count(RowKind::RootChild), 3);
        assert_eq!(count(RowKind::Coverage), 7);
        assert_eq!(count(RowKind::Doubling), 3 * (26 - 2 * g.degree(0)));
        assert_eq!(m.variables().len(), 3 * (2 * 8 + 26));
        let dbl = m.constraints().iter().find(|c| c.kind == RowKind::Doubling).unwrap();
        assert_eq!((dbl.terms[2].1, dbl.rhs), (-16, -16));
    }

    #[test]
    fn sts_structure() {
        let g = Arc::new(catalog("lemke_square").unwrap());
        let r = g.vertex("(v1,v1)").unwrap();
        let m = build_sts_model(g.clone(), r, ModelParams::new(10, 16, Variant::Sts).unwrap()).unwrap();
        assert_eq!(m.variables().len(), 2720);
        assert_eq!(m.blocks().len(), 5);
        let diag = m.constraints().iter().find(|c| c.name == "cover_v4_v4").unwrap();
        assert!(diag.terms.iter().all(|&(_, c)| c == 2));
        assert_eq!(diag.terms.len(), 5);
        let off = m.constraints().iter().find(|c| c.name == "cover_v1_v2").unwrap();
        assert_eq!(off.terms.len(), 10);
        assert!(m.objective().iter().all(|&(_, c)| c == 2));
        let off_root = g.vertex("(v1,v2)").unwrap();
        assert!(matches!(
            build_sts_model(g, off_root, ModelParams::new(2, 4, Variant::Sts).unwrap()),
            Err(MilpError::OffDiagonalRoot(_))
        ));
        let lemke = Arc::new(catalog("lemke").unwrap());
        assert!(matches!(
            build_sts_model(lemke, 0, ModelParams::new(2, 4, Variant::Sts).unwrap()),
            Err(MilpError::Graph(GraphError::NotSelfProduct(_)))
        ));
    }

    #[test]
    fn build_errors() {
        let g = Arc::new(Graph::new::<&str, &str, _, _>("two", ["a", "b"], []).unwrap());
        let p = ModelParams::new(1, 2, Variant::Ts).unwrap();
        assert!(matches!(build_ts_model(g, 0, p), Err(MilpError::Graph(GraphError::Disconnected(_)))));
        assert!(build_ts_model(k2(), 5, p).is_err());
        let clash = Arc::new(Graph::new::<&str, &str, _, _>("c", ["a-b", "a.b"], [("a-b", "a.b")]).unwrap());
        assert_eq!(build_ts_model(clash, 0, p), Err(MilpError::NameCollision("a_b".into())));
        let empty = Arc::new(Graph::new::<&str, &str, _, _>("e", ["()", "a"], [("()", "a")]).unwrap());
        assert!(matches!(build_ts_model(empty, 0, p), Err(MilpError::EmptyName(_))));
    }
}
