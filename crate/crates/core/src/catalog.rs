//! Named graphs: the Lemke family, the weak Bruhat graph B4 and a few
//! parametric families, plus product keys such as `lemke_square`.

use std::sync::OnceLock;

use crate::graph::{parse_graph_blocks, Graph, GraphError};

const FIXTURES: &str = include_str!("../data/catalog.graphs");

fn fixtures() -> &'static [Graph] {
    static GRAPHS: OnceLock<Vec<Graph>> = OnceLock::new();
    GRAPHS.get_or_init(|| parse_graph_blocks(FIXTURES).expect("bundled catalog parses"))
}

/// Keys accepted by [`catalog`], for help text.
pub const KEYS: &[&str] = &[
    "lemke", "lemke2", "lemke3", "lemke4", "bruhat4", "path_<k>", "cycle_<k>", "complete_<k>", "hypercube_<d>",
    "<key>_square", "<key>*<key>",
];

/// Looks up a catalog graph. Hyphens are read as underscores, so
/// `lemke-square` and `lemke_square` name the same graph.
pub fn catalog(key: &str) -> Result<Graph, GraphError> {
    let key = key.trim().replace('-', "_");
    if let Some((a, b)) = key.split_once('*') {
        let g = catalog(a)?.cartesian_product(&catalog(b)?);
        return Ok(g.with_name(&key));
    }
    if let Some(base) = key.strip_suffix("_square") {
        let g = catalog(base)?;
        return Ok(g.cartesian_product(&g).with_name(&key));
    }
    if let Some(g) = fixtures().iter().find(|g| g.name() == key) {
        return Ok(g.clone());
    }
    let (family, param) = key.rsplit_once('_').ok_or_else(|| GraphError::UnknownCatalogKey(key.clone()))?;
    let k: usize = param.parse().map_err(|_| GraphError::UnknownCatalogKey(key.clone()))?;
    match family {
        "path" => path(k),
        "cycle" => cycle(k),
        "complete" => complete(k),
        "hypercube" => hypercube(k),
        _ => Err(GraphError::UnknownCatalogKey(key.clone())),
    }
}

/// Concrete catalog keys for every graph with at most `max_n` vertices:
/// the fixtures, the parametric families, squares and prisms `P2□G`.
/// Coincident graphs (`path_2` and `complete_2`, say) are listed once per key.
pub fn keys_up_to(max_n: usize) -> Vec<String> {
    let mut keys: Vec<String> = fixtures().iter().filter(|g| g.len() <= max_n).map(|g| g.name().to_string()).collect();
    let mut base = Vec::new();
    base.extend((1..=max_n).map(|k| format!("path_{k}")));
    base.extend((3..=max_n).map(|k| format!("cycle_{k}")));
    base.extend((1..=max_n).map(|k| format!("complete_{k}")));
    base.extend((0..).take_while(|&d| 1usize << d <= max_n).map(|d| format!("hypercube_{d}")));
    keys.extend(base.iter().cloned());
    for k in 2..=max_n {
        if k * k <= max_n {
            keys.push(format!("path_{k}_square"));
        }
    }
    for k in 3..=max_n / 2 {
        keys.push(format!("path_2*path_{k}"));
        keys.push(format!("path_2*cycle_{k}"));
    }
    keys
}

fn numbered(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("v{i}")).collect()
}

fn build(name: String, labels: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Graph, GraphError> {
    Graph::new(&name, &labels, edges.iter().map(|&(a, b)| (&labels[a], &labels[b])))
}

pub fn path(k: usize) -> Result<Graph, GraphError> {
    if k < 1 {
        return Err(GraphError::OutOfRange(format!("path needs k >= 1, got {k}")));
    }
    build(format!("path_{k}"), numbered(k), (1..k).map(|i| (i - 1, i)).collect())
}

pub fn cycle(k: usize) -> Result<Graph, GraphError> {
    if k < 3 {
        return Err(GraphError::OutOfRange(format!("a simple cycle needs k >= 3, got {k}")));
    }
    build(format!("cycle_{k}"), numbered(k), (0..k).map(|i| (i, (i + 1) % k)).collect())
}

pub fn complete(k: usize) -> Result<Graph, GraphError> {
    if k < 1 {
        return Err(GraphError::OutOfRange(format!("complete graph needs k >= 1, got {k}")));
    }
    let edges = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    build(format!("complete_{k}"), numbered(k), edges)
}

/// `Q_d` with vertices `b<bits>` in binary counting order.
pub fn hypercube(d: usize) -> Result<Graph, GraphError> {
    if d > 16 {
        return Err(GraphError::OutOfRange(format!("hypercube dimension {d} is too large")));
    }
    let n = 1usize << d;
    let labels = (0..n)
        .map(|i| {
            let bits: String = (0..d).rev().map(|b| if i >> b & 1 == 1 { '1' } else { '0' }).collect();
            format!("b{bits}")
        })
        .collect();
    let edges = (0..n).flat_map(|i| (0..d).map(move |b| (i, i ^ (1 << b))).filter(|&(i, j)| i < j)).collect();
    build(format!("hypercube_{d}"), labels, edges)
}
