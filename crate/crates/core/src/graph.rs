//! Undirected simple graphs with BFS metrics, Cartesian products and the
//! bidirected arc view used by the MILP builder.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("graph `{0}` is disconnected")]
    Disconnected(String),
    #[error("vertices `{0}` and `{1}` lie in different components")]
    NoPath(String, String),
    #[error("unknown catalog key `{0}`")]
    UnknownCatalogKey(String),
    #[error("catalog parameter out of range: {0}")]
    OutOfRange(String),
    #[error("`{0}` is not a product vertex label")]
    NotProductVertex(String),
    #[error("graph `{0}` is not a Cartesian square G□G")]
    NotSelfProduct(String),
    #[error("graph text line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Immutable labelled undirected simple graph.
///
/// Vertex indices follow construction order and every iteration in the crate
/// (BFS queues, arc lists, product ordering) uses that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    name: String,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    connected: bool,
}

impl Graph {
    /// Builds a graph from labels and label pairs. Duplicate edges are merged
    /// after putting endpoints in canonical (vertex-order) form. Disconnected
    /// graphs are accepted; see [`Graph::is_connected`].
    pub fn new<S, A, L, E>(name: &str, labels: L, edges: E) -> Result<Self, GraphError>
    where
        S: AsRef<str>,
        A: AsRef<str>,
        L: IntoIterator<Item = S>,
        E: IntoIterator<Item = (A, A)>,
    {
        let labels: Vec<String> = labels.into_iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| GraphError::UnknownVertex(a.to_string()))?;
            let ib = *index.get(b).ok_or_else(|| GraphError::UnknownVertex(b.to_string()))?;
            pairs.push((ia, ib));
        }
        Self::from_indices(name, labels, index, pairs)
    }

    fn from_indices(
        name: &str,
        labels: Vec<String>,
        index: HashMap<String, usize>,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut seen = HashSet::new();
        let mut edges = Vec::with_capacity(pairs.len());
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in pairs {
            if a == b {
                return Err(GraphError::SelfLoop(labels[a].clone()));
            }
            let e = (a.min(b), a.max(b));
            if seen.insert(e) {
                edges.push(e);
                adjacency[e.0].push(e.1);
                adjacency[e.1].push(e.0);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut g = Graph { name: name.to_string(), labels, index, edges, adjacency, connected: false };
        g.connected = n == 0 || g.bfs(0).iter().all(Option::is_some);
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require_vertex(&self, label: &str) -> Result<usize, GraphError> {
        self.vertex(label).ok_or_else(|| GraphError::UnknownVertex(label.to_string()))
    }

    /// Edges as index pairs `(low, high)` in first-insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of `v` in ascending vertex order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn require_connected(&self) -> Result<(), GraphError> {
        if self.connected {
            Ok(())
        } else {
            Err(GraphError::Disconnected(self.name.clone()))
        }
    }

    fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS distances from `source` to every vertex. Fails on disconnected graphs.
    pub fn distances_from(&self, source: usize) -> Result<Vec<usize>, GraphError> {
        self.require_connected()?;
        Ok(self.bfs(source).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
    }

    /// Shortest-path length between two vertices.
    pub fn dist(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        self.bfs(u)[v].ok_or_else(|| GraphError::NoPath(self.labels[u].clone(), self.labels[v].clone()))
    }

    pub fn dist_by_label(&self, u: &str, v: &str) -> Result<usize, GraphError> {
        self.dist(self.require_vertex(u)?, self.require_vertex(v)?)
    }

    pub fn eccentricity(&self, u: usize) -> Result<usize, GraphError> {
        Ok(self.distances_from(u)?.into_iter().max().unwrap_or(0))
    }

    pub fn diameter(&self) -> Result<usize, GraphError> {
        self.require_connected()?;
        let mut best = 0;
        for u in 0..self.len() {
            best = best.max(self.eccentricity(u)?);
        }
        Ok(best)
    }

    /// Cartesian product `self □ other`. Vertices `(a,b)` are row-major in
    /// `(index of a, index of b)`.
    pub fn cartesian_product(&self, other: &Graph) -> Graph {
        let (n1, n2) = (self.len(), other.len());
        let id = |a: usize, b: usize| a * n2 + b;
        let mut labels = Vec::with_capacity(n1 * n2);
        for a in 0..n1 {
            for b in 0..n2 {
                labels.push(ProductVertex::new(self.label(a), other.label(b)).to_string());
            }
        }
        let mut pairs = Vec::with_capacity(n1 * other.edge_count() + n2 * self.edge_count());
        for a in 0..n1 {
            for b in 0..n2 {
                for &b2 in other.neighbors(b).iter().filter(|&&b2| b2 > b) {
                    pairs.push((id(a, b), id(a, b2)));
                }
                for &a2 in self.neighbors(a).iter().filter(|&&a2| a2 > a) {
                    pairs.push((id(a, b), id(a2, b)));
                }
            }
        }
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let name = format!("{}*{}", self.name, other.name);
        Graph::from_indices(&name, labels, index, pairs).expect("product of simple graphs is simple")
    }

    /// Bidirected view: each edge `{i,j}` becomes arcs `(i,j)` then `(j,i)`.
    pub fn bidirect(&self) -> ArcGraph<'_> {
        let arcs = self.edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        ArcGraph { base: self, arcs }
    }

    /// Index of the coordinate-swapped vertex `(b,a)` for a vertex `(a,b)`.
    pub fn mirror_vertex(&self, v: usize) -> Result<usize, GraphError> {
        let pv = ProductVertex::parse(self.label(v))?;
        let label = pv.mirror().to_string();
        self.vertex(&label).ok_or(GraphError::NotSelfProduct(self.name.clone()))
    }

    /// The coordinate swap as an index permutation, checked to be an
    /// automorphism. Fails unless the graph is a Cartesian square.
    pub fn mirror_map(&self) -> Result<Vec<usize>, GraphError> {
        let not_square = || GraphError::NotSelfProduct(self.name.clone());
        let map = (0..self.len())
            .map(|v| self.mirror_vertex(v).map_err(|_| not_square()))
            .collect::<Result<Vec<_>, _>>()?;
        for &(a, b) in &self.edges {
            if !self.has_edge(map[a], map[b]) {
                return Err(not_square());
            }
        }
        Ok(map)
    }

    pub fn is_self_product(&self) -> bool {
        self.mirror_map().is_ok()
    }

    /// Line format: `graph <name>`, `v <label>` lines, `e <a> <b>` lines, `end`.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph {}\n", self.name);
        for l in &self.labels {
            out.push_str("v ");
            out.push_str(l);
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("e {} {}\n", self.labels[a], self.labels[b]));
        }
        out.push_str("end\n");
        out
    }

    /// Parses the first graph block in `text`.
    pub fn parse_text(text: &str) -> Result<Graph, GraphError> {
        let mut graphs = parse_graph_blocks(text)?;
        if graphs.is_empty() {
            return Err(GraphError::Parse { line: 0, msg: "no graph block".into() });
        }
        Ok(graphs.swap_remove(0))
    }
}

/// Parses every `graph ... end` block of a multi-graph text file.
pub fn parse_graph_blocks(text: &str) -> Result<Vec<Graph>, GraphError> {
    let mut out = Vec::new();
    let mut current: Option<(String, Vec<String>, Vec<(String, String)>)> = None;
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| GraphError::Parse { line: line_no, msg: msg.to_string() };
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap_or("");
        let args: Vec<&str> = parts.collect();
        match (head, current.as_mut()) {
            ("graph", None) => {
                if args.len() != 1 {
                    return Err(err("expected `graph <name>`"));
                }
                current = Some((args[0].to_string(), Vec::new(), Vec::new()));
            }
            ("graph", Some(_)) => return Err(err("nested `graph` block")),
            ("v", Some((_, labels, _))) => match args.as_slice() {
                [label] => labels.push(label.to_string()),
                _ => return Err(err("expected `v <label>`")),
            },
            ("e", Some((_, _, edges))) => match args.as_slice() {
                [a, b] => edges.push((a.to_string(), b.to_string())),
                _ => return Err(err("expected `e <label> <label>`")),
            },
            ("end", Some(_)) => {
                let (name, labels, edges) = current.take().unwrap_or_default();
                let g = Graph::new(&name, &labels, edges.iter().map(|(a, b)| (a, b)))
                    .map_err(|e| GraphError::Parse { line: line_no, msg: e.to_string() })?;
                out.push(g);
            }
            (_, None) => return Err(err("content outside a `graph` block")),
            _ => return Err(err(&format!("unknown directive `{head}`"))),
        }
    }
    if current.is_some() {
        return Err(GraphError::Parse { line: text.lines().count(), msg: "missing `end`".into() });
    }
    Ok(out)
}

/// Vertex of a product graph, rendered `(left,right)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductVertex {
    pub left: String,
    pub right: String,
}

impl ProductVertex {
    pub fn new(left: &str, right: &str) -> Self {
        ProductVertex { left: left.to_string(), right: right.to_string() }
    }

    /// Parses `(left,right)`; the split is at the top-level comma so nested
    /// product labels round-trip.
    pub fn parse(label: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::NotProductVertex(label.to_string());
        let inner = label.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let mut depth = 0i32;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    let (l, r) = (&inner[..i], &inner[i + 1..]);
                    if l.is_empty() || r.is_empty() {
                        return Err(bad());
                    }
                    return Ok(ProductVertex::new(l, r));
                }
                _ => {}
            }
            if depth < 0 {
                return Err(bad());
            }
        }
        Err(bad())
    }

    pub fn mirror(&self) -> Self {
        ProductVertex { left: self.right.clone(), right: self.left.clone() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.left == self.right
    }
}

impl fmt::Display for ProductVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

/// Bidirected view of a graph: two opposite arcs per undirected edge.
#[derive(Debug, Clone)]
pub struct ArcGraph<'g> {
    pub base: &'g Graph,
    pub arcs: Vec<(usize, usize)>,
}

impl ArcGraph<'_> {
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs entering `v`, in arc order.
    pub fn incoming(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied().filter(move |&(_, dst)| dst == v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let edges: Vec<(String, String)> = (1..n).map(|i| (labels[i - 1].clone(), labels[i].clone())).collect();
        Graph::new(&format!("path_{n}"), &labels, edges.iter().map(|(a, b)| (a, b))).unwrap()
    }

    #[test]
    fn smallest_connected_graph() {
        let g = Graph::new("k2", ["a", "b"], [("a", "b")]).unwrap();
        assert_eq!((g.len(), g.edge_count()), (2, 1));
        assert!(g.is_connected());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Graph::new("x", ["a"], [("a", "a")]), Err(GraphError::SelfLoop("a".into())));
        assert_eq!(Graph::new("x", ["a"], [("a", "b")]), Err(GraphError::UnknownVertex("b".into())));
        assert_eq!(Graph::new::<&str, &str, _, _>("x", ["a", "a"], []), Err(GraphError::DuplicateLabel("a".into())));
    }

    #[test]
    fn duplicate_edges_merge() {
        let g = Graph::new("x", ["a", "b"], [("a", "b"), ("b", "a"), ("a", "b")]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn disconnected_graph_is_flagged_and_rejected_by_metrics() {
        let g = Graph::new("x", ["a", "b", "c"], [("a", "b")]).unwrap();
        assert!(!g.is_connected());
        assert!(matches!(g.dist(0, 2), Err(GraphError::NoPath(..))));
        assert!(g.dist(0, 1).is_ok());
        assert!(matches!(g.diameter(), Err(GraphError::Disconnected(_))));
        assert!(matches!(g.eccentricity(0), Err(GraphError::Disconnected(_))));
    }

    #[test]
    fn path_metrics() {
        let g = path(4);
        assert_eq!(g.dist(0, 3).unwrap(), 3);
        assert_eq!(g.dist(2, 2).unwrap(), 0);
        assert_eq!(g.eccentricity(1).unwrap(), 2);
        assert_eq!(g.diameter().unwrap(), 3);
    }

    #[test]
    fn square_of_p2_is_c4() {
        let p2 = path(2);
        let c4 = p2.cartesian_product(&p2);
        assert_eq!((c4.len(), c4.edge_count()), (4, 4));
        assert_eq!(c4.labels(), ["(p0,p0)", "(p0,p1)", "(p1,p0)", "(p1,p1)"]);
        assert!(c4.neighbors(0).iter().all(|&w| c4.degree(w) == 2));
    }

    #[test]
    fn product_with_k1_is_isomorphic_copy() {
        let k1 = Graph::new::<&str, &str, _, _>("k1", ["o"], []).unwrap();
        let g = path(5);
        let h = k1.cartesian_product(&g);
        assert_eq!((h.len(), h.edge_count()), (5, 4));
        for &(a, b) in g.edges() {
            assert!(h.has_edge(a, b));
        }
    }

    #[test]
    fn bidirect_single_edge() {
        let g = Graph::new("k2", ["a", "b"], [("a", "b")]).unwrap();
        assert_eq!(g.bidirect().arcs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn product_vertex_parse_and_mirror() {
        let p = ProductVertex::parse("(v1,v2)").unwrap();
        assert_eq!(p.mirror().to_string(), "(v2,v1)");
        assert_eq!(ProductVertex::parse("(v4,v4)").unwrap().mirror().to_string(), "(v4,v4)");
        let nested = ProductVertex::parse("((a,b),(c,d))").unwrap();
        assert_eq!((nested.left.as_str(), nested.right.as_str()), ("(a,b)", "(c,d)"));
        assert!(ProductVertex::parse("v1").is_err());
        assert!(ProductVertex::parse("(v1)").is_err());
    }

    #[test]
    fn mirror_map_requires_square() {
        let p3 = path(3);
        assert!(p3.mirror_map().is_err());
        let p2 = path(2);
        assert!(p2.cartesian_product(&p3).mirror_map().is_err());
        let sq = p3.cartesian_product(&p3);
        let map = sq.mirror_map().unwrap();
        assert!(map.iter().enumerate().all(|(i, &j)| map[j] == i));
    }

    #[test]
    fn text_round_trip() {
        let g = path(3);
        let text = g.to_text();
        assert_eq!(text, "graph path_3\nv p0\nv p1\nv p2\ne p0 p1\ne p1 p2\nend\n");
        assert_eq!(Graph::parse_text(&text).unwrap(), g);
    }

    #[test]
    fn text_parse_errors_carry_line_numbers() {
        let err = Graph::parse_text("graph g\nv a\nx b\nend\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
        assert!(Graph::parse_text("graph g\nv a\n").is_err());
        let with_comments = "# header\ngraph g  # trailing\nv a\nv b\ne a b # edge\nend\n";
        assert_eq!(Graph::parse_text(with_comments).unwrap().edge_count(), 1);
    }
}
