//! Line-oriented certificate files.
//!
//! The exact format stores every weight as `num/2^k`:
//!
//! ```text
//! certificate v1
//! graph lemke
//! root v1
//! trees 1
//! tree 1
//! edge v1 v2 1/1
//! endtree
//! end
//! ```
//!
//! The decimal format holds hand-transcribed tables. Weights are decimals to
//! be rationalised, either per arc (`edge <parent> <child> <decimal>`) or per
//! vertex (`weight <vertex> <decimal>`), in which case the parent is the root
//! when the vertex is adjacent to it and otherwise the first neighbour in
//! vertex order carrying at least twice the weight. A `symmetric` line appends
//! the mirror of every tree.

use std::sync::Arc;

use thiserror::Error;

use crate::cert::{CertError, CertificateBundle};
use crate::dyadic::{rationalize, DyadicError, DyadicRational};
use crate::graph::Graph;
use crate::strategy::{expand_symmetric, StrategyError, TreeStrategy};

pub const DEFAULT_MAX_EXPONENT: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Weight { line: usize, source: DyadicError },
    #[error("graph `{key}`: {msg}")]
    Graph { key: String, msg: String },
    #[error("tree {tree}: cannot infer a parent for `{vertex}`")]
    NoParent { tree: usize, vertex: String },
    #[error("tree {tree}: {source}")]
    Strategy { tree: usize, source: StrategyError },
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// A parsed certificate together with the graph key it names.
#[derive(Debug, Clone)]
pub struct CertificateFile {
    pub graph_key: String,
    pub bundle: CertificateBundle,
}

fn syntax(line: usize, msg: impl Into<String>) -> CertFileError {
    CertFileError::Syntax { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = l.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

struct Header {
    graph_key: String,
    graph: Arc<Graph>,
    root: usize,
}

enum WeightEntry {
    Edge(usize, usize, String),
    Vertex(usize, String),
}

struct RawTree {
    index: usize,
    entries: Vec<(usize, WeightEntry)>,
}

struct RawFile {
    header: Header,
    declared_trees: Option<usize>,
    symmetric: bool,
    trees: Vec<RawTree>,
}

fn parse_raw<F>(text: &str, magic: &[&str], resolve: F) -> Result<RawFile, CertFileError>
where
    F: Fn(&str) -> Result<Graph, String>,
{
    let mut it = lines(text).peekable();
    match it.next() {
        Some((_, w)) if w == magic => {}
        Some((line, _)) => return Err(syntax(line, format!("expected `{}`", magic.join(" ")))),
        None => return Err(syntax(0, "empty certificate")),
    }
    let mut graph: Option<(String, Arc<Graph>)> = None;
    let mut root: Option<usize> = None;
    let mut declared_trees = None;
    let mut symmetric = false;
    let mut trees: Vec<RawTree> = Vec::new();
    let mut current: Option<RawTree> = None;
    let mut ended = false;

    for (line, w) in it {
        if ended {
            return Err(syntax(line, "content after `end`"));
        }
        let vertex = |label: &str| -> Result<usize, CertFileError> {
            let (_, g) = graph.as_ref().ok_or_else(|| syntax(line, "`graph` must come first"))?;
            g.vertex(label).ok_or_else(|| syntax(line, format!("unknown vertex `{label}`")))
        };
        match (w[0], w.len()) {
            ("graph", 2) if graph.is_none() => {
                let g = resolve(w[1]).map_err(|msg| CertFileError::Graph { key: w[1].to_string(), msg })?;
                graph = Some((w[1].to_string(), Arc::new(g)));
            }
            ("root", 2) if root.is_none() => root = Some(vertex(w[1])?),
            ("trees", 2) if declared_trees.is_none() && trees.is_empty() && current.is_none() => {
                declared_trees = Some(w[1].parse().map_err(|_| syntax(line, "tree count must be an integer"))?);
            }
            ("symmetric", 1) if trees.is_empty() && current.is_none() => symmetric = true,
            ("tree", 2) if current.is_none() => {
                let index: usize = w[1].parse().map_err(|_| syntax(line, "tree index must be an integer"))?;
                if index != trees.len() + 1 {
                    return Err(syntax(line, format!("expected tree {}", trees.len() + 1)));
                }
                if graph.is_none() || root.is_none() {
                    return Err(syntax(line, "`graph` and `root` must precede the trees"));
                }
                current = Some(RawTree { index, entries: Vec::new() });
            }
            ("edge", 4) if current.is_some() => {
                let entry = WeightEntry::Edge(vertex(w[1])?, vertex(w[2])?, w[3].to_string());
                current.as_mut().unwrap().entries.push((line, entry));
            }
            ("weight", 3) if current.is_some() => {
                let entry = WeightEntry::Vertex(vertex(w[1])?, w[2].to_string());
                current.as_mut().unwrap().entries.push((line, entry));
            }
            ("endtree", 1) if current.is_some() => trees.push(current.take().unwrap()),
            ("end", 1) if current.is_none() => ended = true,
            _ => return Err(syntax(line, format!("unexpected `{}`", w.join(" ")))),
        }
    }
    if current.is_some() {
        return Err(syntax(0, "unterminated tree"));
    }
    if !ended {
        return Err(syntax(0, "missing `end`"));
    }
    let (graph_key, graph) = graph.ok_or_else(|| syntax(0, "missing `graph`"))?;
    let root = root.ok_or_else(|| syntax(0, "missing `root`"))?;
    if let Some(t) = declared_trees {
        if t != trees.len() {
            return Err(syntax(0, format!("`trees {t}` declared but {} given", trees.len())));
        }
    }
    Ok(RawFile { header: Header { graph_key, graph, root }, declared_trees, symmetric, trees })
}

/// Parses the exact format. `resolve` maps the `graph` value to a graph.
pub fn parse_certificate<F>(text: &str, resolve: F) -> Result<CertificateFile, CertFileError>
where
    F: Fn(&str) -> Result<Graph, String>,
{
    let raw = parse_raw(text, &["certificate", "v1"], resolve)?;
    if raw.declared_trees.is_none() {
        return Err(syntax(0, "missing `trees`"));
    }
    let Header { graph_key, graph, root } = raw.header;
    let mut strategies = Vec::with_capacity(raw.trees.len());
    for t in raw.trees {
        let mut s = TreeStrategy::new(Arc::clone(&graph), root);
        for (line, entry) in t.entries {
            let WeightEntry::Edge(p, c, w) = entry else {
                return Err(syntax(line, "exact certificates give weights per edge"));
            };
            let w: DyadicRational = w.parse().map_err(|source| CertFileError::Weight { line, source })?;
            s.attach(p, c, w).map_err(|source| CertFileError::Strategy { tree: t.index, source })?;
        }
        strategies.push(s);
    }
    if raw.symmetric {
        strategies = expand_symmetric(&strategies).map_err(|source| CertFileError::Strategy { tree: 1, source })?;
    }
    let bundle = CertificateBundle::new(graph, root, strategies)?;
    Ok(CertificateFile { graph_key, bundle })
}

/// Converts the decimal format into a validated bundle, rationalising every
/// weight to at most `max_exponent` binary places.
pub fn convert_decimal<F>(text: &str, resolve: F, max_exponent: u32) -> Result<CertificateFile, CertFileError>
where
    F: Fn(&str) -> Result<Graph, String>,
{
    let raw = parse_raw(text, &["certificate", "decimal", "v1"], resolve)?;
    let Header { graph_key, graph, root } = raw.header;
    let mut strategies = Vec::with_capacity(raw.trees.len());
    for t in raw.trees {
        let mut explicit = Vec::new();
        let mut weights: Vec<Option<DyadicRational>> = vec![None; graph.len()];
        let mut implicit = Vec::new();
        for (line, entry) in t.entries {
            let (v, text) = match &entry {
                WeightEntry::Edge(_, c, w) => (*c, w),
                WeightEntry::Vertex(v, w) => (*v, w),
            };
            let w = rationalize(text, max_exponent).map_err(|source| CertFileError::Weight { line, source })?;
            if weights[v].is_some() || v == root {
                let source = if v == root {
                    StrategyError::RootAsChild(graph.label(v).to_string())
                } else {
                    StrategyError::DuplicateChild(graph.label(v).to_string())
                };
                return Err(CertFileError::Strategy { tree: t.index, source });
            }
            weights[v] = Some(w.clone());
            match entry {
                WeightEntry::Edge(p, c, _) => explicit.push((p, c, w)),
                WeightEntry::Vertex(v, _) => implicit.push(v),
            }
        }
        let mut s = TreeStrategy::new(Arc::clone(&graph), root);
        for (p, c, w) in explicit {
            s.attach(p, c, w).map_err(|source| CertFileError::Strategy { tree: t.index, source })?;
        }
        for v in implicit {
            let w = weights[v].clone().expect("recorded above");
            let parent = if graph.has_edge(root, v) {
                Some(root)
            } else {
                let twice = w.double();
                graph.neighbors(v).iter().copied().find(|&u| weights[u].as_ref().is_some_and(|x| *x >= twice))
            };
            let p = parent.ok_or_else(|| CertFileError::NoParent { tree: t.index, vertex: graph.label(v).to_string() })?;
            s.attach(p, v, w).map_err(|source| CertFileError::Strategy { tree: t.index, source })?;
        }
        strategies.push(s);
    }
    if raw.symmetric {
        strategies = expand_symmetric(&strategies).map_err(|source| CertFileError::Strategy { tree: 1, source })?;
    }
    let bundle = CertificateBundle::new(graph, root, strategies)?;
    bundle.validate()?;
    Ok(CertificateFile { graph_key, bundle })
}

/// Writes the exact format; arcs appear in breadth-first order.
pub fn write_certificate(graph_key: &str, bundle: &CertificateBundle) -> String {
    let g = bundle.graph();
    let mut out = format!(
        "certificate v1\ngraph {graph_key}\nroot {}\ntrees {}\n",
        g.label(bundle.root()),
        bundle.len()
    );
    for (i, s) in bundle.strategies().iter().enumerate() {
        out.push_str(&format!("tree {}\n", i + 1));
        for (p, c, w) in s.arcs() {
            out.push_str(&format!("edge {} {} {w}\n", g.label(p), g.label(c)));
        }
        out.push_str("endtree\n");
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::cert::covering_bound;

    fn resolve(key: &str) -> Result<Graph, String> {
        catalog(key).map_err(|e| e.to_string())
    }

    const P3: &str = "certificate v1\ngraph path_3\nroot v1\ntrees 1\ntree 1\nedge v1 v2 2/1\nedge v2 v3 1/1\nendtree\nend\n";

    #[test]
    fn exact_round_trip() {
        let f = parse_certificate(P3, resolve).unwrap();
        assert_eq!(f.graph_key, "path_3");
        assert_eq!(covering_bound(&f.bundle).unwrap().bound, 4);
        assert_eq!(write_certificate(&f.graph_key, &f.bundle), P3);
    }

    #[test]
    fn exact_syntax_errors() {
        let bad = P3.replace("trees 1", "trees 2");
        assert!(matches!(parse_certificate(&bad, resolve), Err(CertFileError::Syntax { .. })));
        let bad = P3.replace("2/1", "2/3");
        assert!(matches!(parse_certificate(&bad, resolve), Err(CertFileError::Weight { line: 6, .. })));
        let bad = P3.replace("edge v2 v3", "edge v2 v9");
        assert!(matches!(parse_certificate(&bad, resolve), Err(CertFileError::Syntax { line: 7, .. })));
        let bad = P3.replace("path_3", "nosuch");
        assert!(matches!(parse_certificate(&bad, resolve), Err(CertFileError::Graph { .. })));
        let bad = P3.replace("end\n", "");
        assert!(parse_certificate(&bad, resolve).is_err());
    }

    #[test]
    fn decimal_with_inferred_parents() {
        let text = "certificate decimal v1\ngraph path_4\nroot v1\ntree 1\nweight v4 1.003 # rounds to 1\nweight v2 4\nweight v3 1.999\nendtree\nend\n";
        let f = convert_decimal(text, resolve, DEFAULT_MAX_EXPONENT).unwrap();
        let s = &f.bundle.strategies()[0];
        assert_eq!(s.parent(3), Some(2));
        assert_eq!(s.parent(2), Some(1));
        assert_eq!(s.parent(1), Some(0));
        assert_eq!(s.weight(3).to_string(), "1/1");
        assert_eq!(s.weight(2).to_string(), "2/1");
    }

    #[test]
    fn decimal_rejects_broken_doubling() {
        let text = "certificate decimal v1\ngraph path_3\nroot v1\ntree 1\nedge v1 v2 4\nedge v2 v3 2.1\nendtree\nend\n";
        assert!(matches!(
            convert_decimal(text, resolve, DEFAULT_MAX_EXPONENT),
            Err(CertFileError::Cert(CertError::InvalidStrategy { .. }))
        ));
        let text = "certificate decimal v1\ngraph path_3\nroot v1\ntree 1\nweight v3 2\nweight v2 3\nendtree\nend\n";
        assert!(matches!(convert_decimal(text, resolve, 6), Err(CertFileError::NoParent { .. })));
    }

    #[test]
    fn symmetric_directive_appends_mirrors() {
        let text = "certificate decimal v1\ngraph path_2_square\nroot (v1,v1)\nsymmetric\ntree 1\nweight (v1,v2) 1\nweight (v2,v2) 0.5\nendtree\nend\n";
        let f = convert_decimal(text, resolve, 6).unwrap();
        assert_eq!(f.bundle.len(), 2);
        let r = covering_bound(&f.bundle).unwrap();
        assert_eq!((r.k.to_string(), r.bound), ("1/1".to_string(), 4));
    }
}
