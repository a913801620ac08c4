//! Simple undirected graphs with dense vertex ids and stable edge indices.
//!
//! Vertices are `0..n`. Every edge gets an index in `0..m` at construction
//! time, so colourings can be stored as plain arrays indexed by edge.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex id {id} out of range for n={n}")]
    VertexOutOfRange { id: VertexId, n: usize },
    #[error("malformed graph6: {0}")]
    Graph6(String),
    #[error("malformed edge list at line {line}: {reason}")]
    EdgeList { line: usize, reason: String },
}

/// Text encodings accepted by [`parse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Graph6,
    /// One `u v` pair per line. The vertex count is taken from the
    /// argument, an optional `n=<N>` header line, or `max id + 1`.
    EdgeList {
        n: Option<usize>,
    },
}

/// Immutable simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Edge `i` of the iterator gets index `i`
    /// and is stored with its smaller endpoint first.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            index: HashMap::new(),
        };
        for (u, v) in edges {
            g.push_edge(u, v)?;
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            index: HashMap::new(),
        }
    }

    fn push_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        for id in [u, v] {
            if id >= self.n {
                return Err(GraphError::VertexOutOfRange { id, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::Loop(u));
        }
        let key = (u.min(v), u.max(v));
        if self.index.contains_key(&key) {
            return Err(GraphError::DuplicateEdge(key.0, key.1));
        }
        let e = self.edges.len();
        self.edges.push(key);
        self.index.insert(key, e);
        self.adj[u].push((v, e));
        self.adj[v].push((u, e));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of edge `e`, smaller id first.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// `(neighbour, edge)` pairs at `v`, sorted by neighbour id.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    /// Other endpoint of `e` seen from `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges of `G` both of whose ends have degree one.
    pub fn isolated_edges(&self) -> Vec<EdgeId> {
        self.whole().isolated_edges()
    }

    /// The whole edge set as a subgraph.
    pub fn whole(&self) -> Subgraph<'_> {
        Subgraph::new(self, (0..self.m()).collect())
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    pub fn to_graph6(&self) -> String {
        let mut out = String::new();
        let n = self.n;
        if n <= 62 {
            out.push((n as u8 + 63) as char);
        } else if n <= 258_047 {
            out.push('~');
            for shift in [12, 6, 0] {
                out.push((((n >> shift) & 63) as u8 + 63) as char);
            }
        } else {
            out.push_str("~~");
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push((((n >> shift) & 63) as u8 + 63) as char);
            }
        }
        let mut acc = 0u8;
        let mut bits = 0;
        for j in 1..n {
            for i in 0..j {
                acc = (acc << 1) | u8::from(self.index.contains_key(&(i, j)));
                bits += 1;
                if bits == 6 {
                    out.push((acc + 63) as char);
                    acc = 0;
                    bits = 0;
                }
            }
        }
        if bits > 0 {
            out.push(((acc << (6 - bits)) + 63) as char);
        }
        out
    }

    /// Canonical edge-list text: an `n=<N>` header then `u v` lines in edge
    /// index order.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

pub fn parse(text: &str, format: Format) -> Result<Graph, GraphError> {
    match format {
        Format::Graph6 => parse_graph6(text),
        Format::EdgeList { n } => parse_edge_list(text, n),
    }
}

pub fn parse_graph6(text: &str) -> Result<Graph, GraphError> {
    let text = text.trim();
    let text = text.strip_prefix(">>graph6<<").unwrap_or(text);
    let bytes = text.as_bytes();
    let mut values = Vec::with_capacity(bytes.len());
    for &b in bytes {
        if !(63..=126).contains(&b) {
            return Err(GraphError::Graph6(format!(
                "invalid character {:?}",
                b as char
            )));
        }
        values.push(usize::from(b - 63));
    }
    let (n, body) = match values.as_slice() {
        [] => return Err(GraphError::Graph6("empty input".into())),
        [63, 63, rest @ ..] => {
            if rest.len() < 6 {
                return Err(GraphError::Graph6("truncated size header".into()));
            }
            let n = rest[..6].iter().fold(0usize, |acc, &x| (acc << 6) | x);
            (n, &rest[6..])
        }
        [63, rest @ ..] => {
            if rest.len() < 3 {
                return Err(GraphError::Graph6("truncated size header".into()));
            }
            let n = rest[..3].iter().fold(0usize, |acc, &x| (acc << 6) | x);
            (n, &rest[3..])
        }
        [n, rest @ ..] => (*n, rest),
    };
    let nbits = n * n.saturating_sub(1) / 2;
    let expected = nbits.div_ceil(6);
    if body.len() != expected {
        return Err(GraphError::Graph6(format!(
            "expected {expected} body characters for n={n}, found {}",
            body.len()
        )));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let word = body[k / 6];
            if (word >> (5 - k % 6)) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    // padding bits must be zero
    if nbits % 6 != 0 {
        let last = body[body.len() - 1];
        let pad = 6 - nbits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return Err(GraphError::Graph6("non-zero padding bits".into()));
        }
    }
    Graph::new(n, edges)
}

pub fn parse_edge_list(text: &str, declared_n: Option<usize>) -> Result<Graph, GraphError> {
    let mut header_n = None;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if header_n.is_some() || !pairs.is_empty() {
                return Err(GraphError::EdgeList {
                    line: line_no,
                    reason: "vertex count header must come first".into(),
                });
            }
            header_n = Some(
                rest.trim()
                    .parse::<usize>()
                    .map_err(|e| GraphError::EdgeList {
                        line: line_no,
                        reason: e.to_string(),
                    })?,
            );
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize, GraphError> {
            let tok = it.next().ok_or_else(|| GraphError::EdgeList {
                line: line_no,
                reason: "expected two vertex ids".into(),
            })?;
            tok.parse::<usize>().map_err(|e| GraphError::EdgeList {
                line: line_no,
                reason: format!("{tok:?}: {e}"),
            })
        };
        let u = next()?;
        let v = next()?;
        if it.next().is_some() {
            return Err(GraphError::EdgeList {
                line: line_no,
                reason: "trailing tokens".into(),
            });
        }
        pairs.push((u, v));
    }
    let n = match (declared_n, header_n) {
        (Some(a), Some(b)) if a != b => {
            return Err(GraphError::EdgeList {
                line: 1,
                reason: format!("header n={b} disagrees with declared n={a}"),
            })
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
    };
    Graph::new(n, pairs)
}

/// A subset of the host graph's edges; its vertex set is the set of
/// endpoints of those edges.
#[derive(Debug, Clone)]
pub struct Subgraph<'g> {
    host: &'g Graph,
    edges: Vec<EdgeId>,
    degree: Vec<usize>,
}

impl<'g> Subgraph<'g> {
    /// `edges` must be valid edge ids of `host`; they are sorted and
    /// deduplicated.
    pub fn new(host: &'g Graph, mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        assert!(
            edges.last().is_none_or(|&e| e < host.m()),
            "edge id out of range"
        );
        let mut degree = vec![0; host.n()];
        for &e in &edges {
            let (u, v) = host.endpoints(e);
            degree[u] += 1;
            degree[v] += 1;
        }
        Subgraph {
            host,
            edges,
            degree,
        }
    }

    pub fn empty(host: &'g Graph) -> Self {
        Subgraph::new(host, Vec::new())
    }

    /// Subgraph of `host` induced by the vertices where `keep` is true.
    pub fn induced(host: &'g Graph, keep: &[bool]) -> Self {
        let edges = host
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| keep[u] && keep[v])
            .map(|(e, _)| e)
            .collect();
        Subgraph::new(host, edges)
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        (0..self.host.n()).filter(|&v| self.degree[v] > 0).collect()
    }

    /// Edges whose two ends both have degree one inside this subgraph.
    pub fn isolated_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .copied()
            .filter(|&e| {
                let (u, v) = self.host.endpoints(e);
                self.degree[u] == 1 && self.degree[v] == 1
            })
            .collect()
    }

    /// Adjacency lists restricted to this subgraph, sorted by neighbour id.
    pub fn adjacency(&self) -> Vec<Vec<(VertexId, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.host.n()];
        for &e in &self.edges {
            let (u, v) = self.host.endpoints(e);
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected components, ordered by their smallest vertex id.
    pub fn components(&self) -> Vec<Subgraph<'g>> {
        let adj = self.adjacency();
        let n = self.host.n();
        let mut comp = vec![usize::MAX; n];
        let mut groups: Vec<Vec<EdgeId>> = Vec::new();
        for start in 0..n {
            if self.degree[start] == 0 || comp[start] != usize::MAX {
                continue;
            }
            let id = groups.len();
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(u, _) in &adj[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        stack.push(u);
                    }
                }
            }
            groups.push(Vec::new());
        }
        for &e in &self.edges {
            let (u, _) = self.host.endpoints(e);
            groups[comp[u]].push(e);
        }
        groups
            .into_iter()
            .map(|edges| Subgraph::new(self.host, edges))
            .collect()
    }
}
