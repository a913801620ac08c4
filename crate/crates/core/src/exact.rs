//! Exhaustive backtracking search for neighbour sum distinguishing
//! colourings of small graphs, and the resulting exact values of the edge
//! and total NSD indices.

use thiserror::Error;

use crate::colouring::{verify_nsd, Colour, Mode, TotalColouring};
use crate::graph::{Graph, VertexId};

/// Palettes wider than this do not fit the search's bitmask domains.
pub const MAX_K: u64 = 63;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("graph has an isolated edge; no NSD edge colouring exists")]
    IsolatedEdge,
    #[error("graph has no edges")]
    NoEdges,
    #[error("palette size {0} outside 1..={MAX_K}")]
    InvalidK(u64),
    #[error("node limit reached after {nodes} nodes while testing k={k}; result unknown")]
    NodeLimit { k: u64, nodes: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub node_limit: u64,
    /// Pre-assign colour 1 to the first edge of a maximum-degree vertex.
    pub symmetry_seed: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: 100_000_000,
            symmetry_seed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub k: u64,
    pub witness: TotalColouring,
    pub nodes: u64,
}

/// Uses the default configuration.
pub fn exists_colouring(
    g: &Graph,
    k: u64,
    mode: Mode,
) -> Result<Option<TotalColouring>, SolveError> {
    Solver::default().exists(g, k, mode).map(|(w, _)| w)
}

pub fn chi_sigma(g: &Graph, mode: Mode) -> Result<SolveResult, SolveError> {
    Solver::default().chi_sigma(g, mode)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    pub config: SolverConfig,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver { config }
    }

    /// Searches for an NSD colouring with colours in `1..=k`. Returns the
    /// witness (if any) and the number of nodes explored.
    pub fn exists(
        &self,
        g: &Graph,
        k: u64,
        mode: Mode,
    ) -> Result<(Option<TotalColouring>, u64), SolveError> {
        if k == 0 || k > MAX_K {
            return Err(SolveError::InvalidK(k));
        }
        if mode == Mode::Edge && !g.isolated_edges().is_empty() {
            return Err(SolveError::IsolatedEdge);
        }
        let mut search = Search::new(g, k, mode, self.config.node_limit);
        if self.config.symmetry_seed {
            if let Some(el) = search.seed_element() {
                if k >= 1 && search.domain(el) & 1 != 0 {
                    search.assign(el, 1);
                }
            }
        }
        let found = search.run()?;
        let nodes = search.nodes;
        if !found {
            return Ok((None, nodes));
        }
        let witness = search.witness();
        debug_assert!(verify_nsd(g, &witness).pass);
        Ok((Some(witness), nodes))
    }

    /// Smallest `k` admitting an NSD colouring, searching upwards from `Δ`
    /// (edge mode) or `Δ+1` (total mode).
    pub fn chi_sigma(&self, g: &Graph, mode: Mode) -> Result<SolveResult, SolveError> {
        let delta = g.max_degree() as u64;
        let start = match mode {
            Mode::Edge => {
                if g.m() == 0 {
                    return Err(SolveError::NoEdges);
                }
                delta
            }
            Mode::Total if g.m() == 0 => 1,
            Mode::Total => delta + 1,
        };
        let mut total_nodes = 0;
        for k in start..=MAX_K {
            let (w, nodes) = match self.exists(g, k, mode) {
                Ok(r) => r,
                Err(SolveError::NodeLimit { nodes, .. }) => {
                    return Err(SolveError::NodeLimit {
                        k,
                        nodes: total_nodes + nodes,
                    })
                }
                Err(e) => return Err(e),
            };
            total_nodes += nodes;
            if let Some(witness) = w {
                return Ok(SolveResult {
                    k,
                    witness,
                    nodes: total_nodes,
                });
            }
        }
        Err(SolveError::InvalidK(MAX_K + 1))
    }
}

/// Backtracking state. Elements are the edges (edge mode) or the vertices
/// followed by the edges (total mode).
struct Search<'g> {
    g: &'g Graph,
    k: u64,
    mode: Mode,
    node_limit: u64,
    nodes: u64,
    /// Elements that must receive distinct colours from each element.
    conflicts: Vec<Vec<usize>>,
    /// Vertices whose sum each element contributes to.
    owners: Vec<Vec<VertexId>>,
    value: Vec<Colour>,
    partial: Vec<u64>,
    remaining: Vec<usize>,
    full_mask: u64,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, k: u64, mode: Mode, node_limit: u64) -> Self {
        let offset = match mode {
            Mode::Edge => 0,
            Mode::Total => g.n(),
        };
        let count = offset + g.m();
        let mut conflicts = vec![Vec::new(); count];
        let mut owners = vec![Vec::new(); count];
        if mode == Mode::Total {
            for v in 0..g.n() {
                owners[v].push(v);
                for &(u, e) in g.incident(v) {
                    conflicts[v].push(u);
                    conflicts[v].push(offset + e);
                }
            }
        }
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let el = offset + e;
            owners[el].extend([u, v]);
            for w in [u, v] {
                if mode == Mode::Total {
                    conflicts[el].push(w);
                }
                for &(_, f) in g.incident(w) {
                    if f != e {
                        conflicts[el].push(offset + f);
                    }
                }
            }
        }
        let mut remaining = vec![0; g.n()];
        for list in &owners {
            for &v in list {
                remaining[v] += 1;
            }
        }
        Search {
            g,
            k,
            mode,
            node_limit,
            nodes: 0,
            conflicts,
            owners,
            value: vec![0; count],
            partial: vec![0; g.n()],
            remaining,
            full_mask: if k == 64 {
                u64::MAX
            } else {
                ((1u64 << k) - 1) << 1
            },
        }
    }

    fn offset(&self) -> usize {
        match self.mode {
            Mode::Edge => 0,
            Mode::Total => self.g.n(),
        }
    }

    fn seed_element(&self) -> Option<usize> {
        let delta = self.g.max_degree();
        let v = (0..self.g.n()).find(|&v| self.g.degree(v) == delta && delta > 0)?;
        Some(self.offset() + self.g.incident(v)[0].1)
    }

    /// Bitmask of colours (bit `c` for colour `c`) still allowed at `el`.
    fn domain(&self, el: usize) -> u64 {
        let mut mask = self.full_mask;
        for &y in &self.conflicts[el] {
            let c = self.value[y];
            if c != 0 {
                mask &= !(1u64 << c);
            }
        }
        let owners = &self.owners[el];
        let last: Vec<VertexId> = owners
            .iter()
            .copied()
            .filter(|&v| self.remaining[v] == 1)
            .collect();
        if last.len() == 2 && self.partial[last[0]] == self.partial[last[1]] {
            // both ends complete together with equal sums whatever we pick
            return 0;
        }
        for &v in &last {
            for u in self.g.neighbours(v) {
                if self.remaining[u] == 0 {
                    let target = self.partial[u];
                    if target > self.partial[v] {
                        let c = target - self.partial[v];
                        if c <= self.k {
                            mask &= !(1u64 << c);
                        }
                    }
                }
            }
        }
        mask
    }

    fn assign(&mut self, el: usize, c: Colour) {
        self.value[el] = c;
        for &v in &self.owners[el] {
            self.partial[v] += c;
            self.remaining[v] -= 1;
        }
    }

    fn unassign(&mut self, el: usize) {
        let c = self.value[el];
        self.value[el] = 0;
        for &v in &self.owners[el] {
            self.partial[v] -= c;
            self.remaining[v] += 1;
        }
    }

    /// Picks the unassigned element with the fewest allowed colours, breaking
    /// ties by most unassigned conflicting elements.
    fn select(&self) -> Option<(usize, u64)> {
        let mut best: Option<(u32, usize, usize, u64)> = None;
        for el in 0..self.value.len() {
            if self.value[el] != 0 {
                continue;
            }
            let dom = self.domain(el);
            let size = dom.count_ones();
            if size == 0 {
                return Some((el, 0));
            }
            let open = self.conflicts[el]
                .iter()
                .filter(|&&y| self.value[y] == 0)
                .count();
            let better = match best {
                None => true,
                Some((s, o, _, _)) => size < s || (size == s && open > o),
            };
            if better {
                best = Some((size, open, el, dom));
            }
        }
        best.map(|(_, _, el, dom)| (el, dom))
    }

    fn run(&mut self) -> Result<bool, SolveError> {
        let Some((el, mut dom)) = self.select() else {
            return Ok(true);
        };
        while dom != 0 {
            let c = dom.trailing_zeros() as u64;
            dom &= dom - 1;
            self.nodes += 1;
            if self.nodes > self.node_limit {
                return Err(SolveError::NodeLimit {
                    k: self.k,
                    nodes: self.nodes,
                });
            }
            self.assign(el, c);
            if self.run()? {
                return Ok(true);
            }
            self.unassign(el);
        }
        Ok(false)
    }

    fn witness(&self) -> TotalColouring {
        let off = self.offset();
        let vertex = match self.mode {
            Mode::Edge => vec![0; self.g.n()],
            Mode::Total => self.value[..off].to_vec(),
        };
        TotalColouring::from_parts(self.g, self.mode, vertex, self.value[off..].to_vec())
            .expect("complete assignment")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn exists_examples() {
        let k3 = cycle(3);
        let w = exists_colouring(&k3, 3, Mode::Edge).unwrap().unwrap();
        assert!(verify_nsd(&k3, &w).pass);
        assert!(exists_colouring(&k3, 2, Mode::Edge).unwrap().is_none());
        let k2 = path(2);
        let w = exists_colouring(&k2, 3, Mode::Total).unwrap().unwrap();
        assert!(verify_nsd(&k2, &w).pass);
    }

    #[test]
    fn exists_errors() {
        let k2 = path(2);
        assert_eq!(
            exists_colouring(&k2, 3, Mode::Edge),
            Err(SolveError::IsolatedEdge)
        );
        assert_eq!(
            exists_colouring(&cycle(3), 0, Mode::Edge),
            Err(SolveError::InvalidK(0))
        );
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_sigma(&path(3), Mode::Edge).unwrap().k, 2);
        assert_eq!(chi_sigma(&cycle(5), Mode::Edge).unwrap().k, 5);
        assert_eq!(chi_sigma(&path(2), Mode::Total).unwrap().k, 3);
        assert_eq!(
            chi_sigma(&Graph::empty(3), Mode::Edge),
            Err(SolveError::NoEdges)
        );
        assert_eq!(chi_sigma(&Graph::empty(3), Mode::Total).unwrap().k, 1);
    }

    #[test]
    fn node_limit_reports_unknown() {
        let solver = Solver::new(SolverConfig {
            node_limit: 3,
            symmetry_seed: false,
        });
        let err = solver.chi_sigma(&cycle(5), Mode::Edge).unwrap_err();
        assert!(matches!(err, SolveError::NodeLimit { .. }));
    }

    #[test]
    fn monotone_in_k() {
        let g = cycle(5);
        for k in 1..8 {
            let here = exists_colouring(&g, k, Mode::Edge).unwrap();
            if let Some(w) = here {
                assert!(w.max_colour() <= k);
                assert!(exists_colouring(&g, k + 1, Mode::Edge).unwrap().is_some());
            }
        }
    }
}
