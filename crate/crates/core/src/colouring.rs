//! Edge and total colourings, vertex sums, and the properness / NSD checks
//! every other module defers to.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};

pub type Colour = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Proper edge colouring; vertex colours are all zero.
    Edge,
    /// Proper total colouring; vertex colours are positive.
    Total,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Edge => "edge",
            Mode::Total => "total",
        })
    }
}

impl FromStr for Mode {
    type Err = ColouringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(Mode::Edge),
            "total" => Ok(Mode::Total),
            other => Err(ColouringError::Format(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColouringError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("colouring covers {found} {what}, graph has {expected}")]
    DomainMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("edge {0} has colour 0")]
    ZeroEdgeColour(EdgeId),
    #[error("vertex {vertex} has colour {colour}, which is invalid in {mode} mode")]
    BadVertexColour {
        vertex: VertexId,
        colour: Colour,
        mode: Mode,
    },
    #[error("colouring text: {0}")]
    Format(String),
}

/// A colouring of `V ∪ E`. In edge mode every vertex colour is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TotalColouring {
    mode: Mode,
    vertex: Vec<Colour>,
    edge: Vec<Colour>,
}

impl TotalColouring {
    pub fn from_parts(
        g: &Graph,
        mode: Mode,
        vertex: Vec<Colour>,
        edge: Vec<Colour>,
    ) -> Result<Self, ColouringError> {
        if vertex.len() != g.n() {
            return Err(ColouringError::DomainMismatch {
                what: "vertices",
                expected: g.n(),
                found: vertex.len(),
            });
        }
        if edge.len() != g.m() {
            return Err(ColouringError::DomainMismatch {
                what: "edges",
                expected: g.m(),
                found: edge.len(),
            });
        }
        if let Some(e) = edge.iter().position(|&c| c == 0) {
            return Err(ColouringError::ZeroEdgeColour(e));
        }
        for (v, &c) in vertex.iter().enumerate() {
            let ok = match mode {
                Mode::Edge => c == 0,
                Mode::Total => c >= 1,
            };
            if !ok {
                return Err(ColouringError::BadVertexColour {
                    vertex: v,
                    colour: c,
                    mode,
                });
            }
        }
        Ok(TotalColouring { mode, vertex, edge })
    }

    /// Edge-mode colouring from edge colours alone.
    pub fn edge_only(g: &Graph, edge: Vec<Colour>) -> Result<Self, ColouringError> {
        Self::from_parts(g, Mode::Edge, vec![0; g.n()], edge)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn vertex_colour(&self, v: VertexId) -> Colour {
        self.vertex[v]
    }

    pub fn edge_colour(&self, e: EdgeId) -> Colour {
        self.edge[e]
    }

    pub fn vertex_colours(&self) -> &[Colour] {
        &self.vertex
    }

    pub fn edge_colours(&self) -> &[Colour] {
        &self.edge
    }

    /// Panics on colour 0; edge colours are positive.
    pub fn set_edge(&mut self, e: EdgeId, c: Colour) {
        assert!(c >= 1, "edge colours are positive");
        self.edge[e] = c;
    }

    /// Panics in edge mode or on colour 0.
    pub fn set_vertex(&mut self, v: VertexId, c: Colour) {
        assert!(
            self.mode == Mode::Total && c >= 1,
            "vertex colours exist only in total mode"
        );
        self.vertex[v] = c;
    }

    pub fn max_colour(&self) -> Colour {
        self.edge
            .iter()
            .chain(self.vertex.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Total sums of all vertices (weighted degree plus vertex colour).
    pub fn sums(&self, g: &Graph) -> Vec<u64> {
        let mut s = self.vertex.clone();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            s[u] += self.edge[e];
            s[v] += self.edge[e];
        }
        s
    }

    /// Text form: a `nsd <mode> n=<n> m=<m> maxcolour=<k>` header, `v <id> <c>`
    /// lines in total mode, then `e <u> <v> <c>` lines in edge-index order.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = format!(
            "nsd {} n={} m={} maxcolour={}\n",
            self.mode,
            g.n(),
            g.m(),
            self.max_colour()
        );
        if self.mode == Mode::Total {
            for (v, c) in self.vertex.iter().enumerate() {
                let _ = writeln!(out, "v {v} {c}");
            }
        }
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let _ = writeln!(out, "e {u} {v} {}", self.edge[e]);
        }
        out
    }

    pub fn from_text(text: &str, g: &Graph) -> Result<Self, ColouringError> {
        let bad = |msg: String| ColouringError::Format(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "nsd" {
            return Err(bad(format!("bad header {header:?}")));
        }
        let mode: Mode = fields[1].parse()?;
        let mut kv = HashMap::new();
        for f in &fields[2..] {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| bad(format!("bad header field {f:?}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| bad(format!("bad header value {f:?}")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| bad(format!("missing {k}")))
        };
        let (n, m, declared_max) = (get("n")?, get("m")?, get("maxcolour")?);
        if n != g.n() as u64 || m != g.m() as u64 {
            return Err(bad(format!(
                "header n={n} m={m} does not match graph n={} m={}",
                g.n(),
                g.m()
            )));
        }
        let mut vertex: Vec<Option<Colour>> = vec![None; g.n()];
        let mut edge: Vec<Option<Colour>> = vec![None; g.m()];
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| bad(format!("bad number in {line:?}")))
            };
            match toks.as_slice() {
                ["v", id, c] if mode == Mode::Total => {
                    let id = num(id)? as usize;
                    let slot = vertex
                        .get_mut(id)
                        .ok_or(ColouringError::UnknownVertex(id))?;
                    if slot.replace(num(c)?).is_some() {
                        return Err(bad(format!("vertex {id} coloured twice")));
                    }
                }
                ["e", u, v, c] => {
                    let (u, v) = (num(u)? as usize, num(v)? as usize);
                    let e = g
                        .edge_between(u, v)
                        .filter(|_| u < g.n() && v < g.n())
                        .ok_or_else(|| bad(format!("no edge {u}-{v} in graph")))?;
                    if edge[e].replace(num(c)?).is_some() {
                        return Err(bad(format!("edge {u}-{v} coloured twice")));
                    }
                }
                _ => return Err(bad(format!("unexpected line {line:?}"))),
            }
        }
        let vertex = match mode {
            Mode::Edge => vec![0; g.n()],
            Mode::Total => vertex
                .into_iter()
                .enumerate()
                .map(|(v, c)| c.ok_or_else(|| bad(format!("vertex {v} missing"))))
                .collect::<Result<_, _>>()?,
        };
        let edge = edge
            .into_iter()
            .enumerate()
            .map(|(e, c)| c.ok_or_else(|| bad(format!("edge {e} missing"))))
            .collect::<Result<_, _>>()?;
        let c = Self::from_parts(g, mode, vertex, edge)?;
        if c.max_colour() != declared_max {
            return Err(bad(format!(
                "header maxcolour={declared_max} but colouring uses {}",
                c.max_colour()
            )));
        }
        Ok(c)
    }
}

/// Sum of the colours on edges at `v`.
pub fn weighted_degree(g: &Graph, c: &TotalColouring, v: VertexId) -> Result<u64, ColouringError> {
    if v >= g.n() {
        return Err(ColouringError::UnknownVertex(v));
    }
    Ok(g.incident(v).iter().map(|&(_, e)| c.edge_colour(e)).sum())
}

/// `c(v)` plus the weighted degree; equal to the weighted degree in edge mode.
pub fn total_sum(g: &Graph, c: &TotalColouring, v: VertexId) -> Result<u64, ColouringError> {
    Ok(weighted_degree(g, c, v)? + c.vertex_colour(v))
}

/// A pair of elements that are incident or adjacent and share a colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    Edges(EdgeId, EdgeId),
    Vertices(VertexId, VertexId),
    EdgeVertex(EdgeId, VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub properness: Vec<Violation>,
    /// Edges `uv` (as `(u, v)`, `u < v`) whose ends have equal sums.
    pub conflicts: Vec<(VertexId, VertexId)>,
    pub max_colour: Colour,
    pub pass: bool,
}

fn properness_violations(g: &Graph, c: &TotalColouring) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut by_colour: HashMap<Colour, Vec<EdgeId>> = HashMap::new();
    for v in 0..g.n() {
        by_colour.clear();
        for &(_, e) in g.incident(v) {
            by_colour.entry(c.edge_colour(e)).or_default().push(e);
        }
        for group in by_colour.values() {
            for (i, &a) in group.iter().enumerate() {
                for &b in &group[i + 1..] {
                    out.push(Violation::Edges(a.min(b), a.max(b)));
                }
            }
        }
        if c.mode() == Mode::Total {
            let cv = c.vertex_colour(v);
            for &(u, e) in g.incident(v) {
                if c.edge_colour(e) == cv {
                    out.push(Violation::EdgeVertex(e, v));
                }
                if v < u && c.vertex_colour(u) == cv {
                    out.push(Violation::Vertices(v, u));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Edge mode: adjacent edges differ. Total mode: additionally adjacent
/// vertices differ and every edge differs from both of its ends.
pub fn is_proper(g: &Graph, c: &TotalColouring) -> bool {
    properness_violations(g, c).is_empty()
}

/// Lists every properness violation and every edge whose ends have equal
/// (total) sums.
pub fn verify_nsd(g: &Graph, c: &TotalColouring) -> VerificationReport {
    let properness = properness_violations(g, c);
    let sums = c.sums(g);
    let conflicts: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| sums[u] == sums[v])
        .collect();
    let pass = properness.is_empty() && conflicts.is_empty();
    VerificationReport {
        properness,
        conflicts,
        max_colour: c.max_colour(),
        pass,
    }
}
