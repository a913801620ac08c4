//! Separation of the large vertices: recolouring the base subgraph into
//! distinct residues mod `B`, then walking an ordering of each component and
//! moving every large vertex's sum into a pair `{s, s±B}` no assigned
//! neighbour holds.

use std::collections::{HashMap, HashSet};

use crate::colouring::TotalColouring;
use crate::graph::{EdgeId, Graph, Subgraph, VertexId};

use super::classify::Classification;
use super::preprocess::{isolated_neighbour, split_at};
use super::profile::{power, Profile};
use super::{PipelineError, Stage, Work};

/// `⌈b_coef1·√Δ + b_coef2·Δ^base_slack_exp⌉`.
pub fn compute_b(delta: usize, profile: &Profile) -> i64 {
    let d = delta as f64;
    (profile.b_coef1 * d.sqrt() + profile.b_coef2 * power(d, profile.base_slack_exp)).ceil() as i64
}

/// A pair `{low, low+B}` of sums; `low / B` (floored) is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pair {
    pub low: i64,
    pub high: i64,
}

impl Pair {
    pub fn contains(&self, s: i64) -> bool {
        s == self.low || s == self.high
    }
}

/// The pair containing `s`: with `s = mB + j`, `0 ≤ j < B`, it is
/// `{s, s+B}` for even `m` and `{s−B, s}` for odd `m`.
pub fn pair_of(s: i64, b: i64) -> Pair {
    assert!(b > 0, "B must be positive");
    let m = s.div_euclid(b);
    let low = if m % 2 == 0 { s } else { s - b };
    Pair { low, high: low + b }
}

/// Pairs held by the large vertices after separation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairAssignment {
    pub pairs: Vec<Option<Pair>>,
    /// Final vertices of a component allowed to share a pair with one
    /// neighbour, provided the two sums differ.
    pub shared: Vec<(VertexId, VertexId)>,
}

impl PairAssignment {
    /// Adjacent large vertices hold disjoint pairs, except recorded shared
    /// pairs, which must still carry different sums.
    pub fn check(&self, g: &Graph, sums: &[u64]) -> Result<(), (VertexId, VertexId)> {
        let shared: HashSet<(VertexId, VertexId)> = self
            .shared
            .iter()
            .flat_map(|&(a, b)| [(a, b), (b, a)])
            .collect();
        for &(u, v) in g.edges() {
            let (Some(p), Some(q)) = (self.pairs[u], self.pairs[v]) else {
                continue;
            };
            if p == q && !(shared.contains(&(u, v)) && sums[u] != sums[v]) {
                return Err((u, v));
            }
            if !p.contains(sums[u] as i64) || !q.contains(sums[v] as i64) {
                return Err((u, v));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecolourStats {
    pub recoloured: usize,
    /// Largest number of residues excluded at one edge.
    pub max_excluded: usize,
}

/// Moves every edge of `h` into `[m'+B+1, m'+2B]` so adjacent `h` edges get
/// distinct residues mod `B`, keeping the isolated edges of the small part
/// non-congruent at their ends.
pub fn recolour_mod_b(
    g: &Graph,
    c: &TotalColouring,
    h: &Subgraph<'_>,
    b: i64,
    isolated: &[EdgeId],
    m_prime: u64,
) -> Result<(TotalColouring, RecolourStats), PipelineError> {
    let mut w = Work::new(g, c);
    let touching = isolated_neighbour(g, isolated);
    let mut last_h = vec![None; g.m()];
    for &e in h.edges() {
        for &f in &touching[e] {
            last_h[f] = Some(e);
        }
    }
    let adj = h.adjacency();
    let mut done = vec![false; g.m()];
    let mut stats = RecolourStats::default();
    let base = m_prime as i64 + b + 1;
    let mut excluded = vec![false; b as usize];
    for &e in h.edges() {
        excluded.iter_mut().for_each(|x| *x = false);
        let (u, v) = g.endpoints(e);
        for x in [u, v] {
            for &(_, f) in &adj[x] {
                if f != e && done[f] {
                    excluded[w.edge[f].rem_euclid(b) as usize] = true;
                }
            }
        }
        let old = w.edge[e];
        for &f in touching[e].iter().filter(|&&f| last_h[f] == Some(e)) {
            let (t, o) = split_at(g, e, f);
            // colour ≡ sum(o) − sum(t) + old would make the ends congruent
            excluded[(w.sum[o] - w.sum[t] + old).rem_euclid(b) as usize] = true;
        }
        stats.max_excluded = stats
            .max_excluded
            .max(excluded.iter().filter(|&&x| x).count());
        let Some(colour) = (base..base + b).find(|&col| !excluded[col.rem_euclid(b) as usize])
        else {
            return Err(PipelineError::stage(
                Stage::RecolourModB,
                format!("every residue mod {b} is excluded at edge {u}-{v}"),
            ));
        };
        w.recolour(e, colour);
        done[e] = true;
        stats.recoloured += 1;
    }
    Ok((w.into_colouring(), stats))
}

/// Processing order of the vertices of `h`: each component in reverse
/// breadth-first order from its smallest vertex, so every vertex but the
/// root has a neighbour later in the order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ordering {
    sequence: Vec<VertexId>,
    /// End offsets of the components within `sequence`.
    ends: Vec<usize>,
}

impl Ordering {
    pub fn sequence(&self) -> &[VertexId] {
        &self.sequence
    }

    pub fn components(&self) -> impl Iterator<Item = &[VertexId]> {
        let mut start = 0;
        self.ends.iter().map(move |&end| {
            let s = &self.sequence[start..end];
            start = end;
            s
        })
    }
}

pub fn build_ordering(h: &Subgraph<'_>) -> Ordering {
    let adj = h.adjacency();
    let n = h.host().n();
    let mut seen = vec![false; n];
    let mut out = Ordering::default();
    for root in 0..n {
        if seen[root] || adj[root].is_empty() {
            continue;
        }
        let mut bfs = vec![root];
        seen[root] = true;
        let mut i = 0;
        while i < bfs.len() {
            let x = bfs[i];
            i += 1;
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    bfs.push(y);
                }
            }
        }
        bfs.reverse();
        out.sequence.extend(bfs);
        out.ends.push(out.sequence.len());
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistinguishStats {
    pub assigned: usize,
    pub toggles: usize,
    pub residue_moves: usize,
    pub max_modifications: u8,
    /// Fewest attainable sums seen at any vertex.
    pub min_options: usize,
    /// Most pairs excluded by assigned neighbours at any vertex.
    pub max_blocked: usize,
    pub components: usize,
    pub shared_pairs: usize,
    /// Final edges whose best residue left more than `2√Δ/11` same-residue
    /// neighbours at an end.
    pub residue_misses: usize,
}

/// Allowed sign of a toggle of ±B on an edge.
#[derive(Debug, Clone, Copy)]
struct Toggle {
    edge: EdgeId,
    other: VertexId,
    down: bool,
    up: bool,
}

struct Separator<'a, 'g> {
    g: &'g Graph,
    w: Work<'g>,
    b: i64,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    pos: Vec<usize>,
    large: &'a [bool],
    touching: Vec<Vec<EdgeId>>,
    delta: usize,
    mods: Vec<u8>,
    pairs: Vec<Option<Pair>>,
    shared: Vec<(VertexId, VertexId)>,
    stats: DistinguishStats,
}

impl Separator<'_, '_> {
    /// Residues `x ∈ [0, B)` that may be added to `e`.
    fn residue_options(&self, e: EdgeId) -> Vec<i64> {
        let b = self.b;
        let mut excluded = vec![false; b as usize];
        let cur = self.w.edge[e];
        let (u, v) = self.g.endpoints(e);
        for x in [u, v] {
            for &(_, f) in &self.adj[x] {
                if f != e {
                    excluded[(self.w.edge[f] - cur).rem_euclid(b) as usize] = true;
                }
            }
        }
        for &f in &self.touching[e] {
            let (t, o) = split_at(self.g, e, f);
            excluded[(self.w.sum[o] - self.w.sum[t]).rem_euclid(b) as usize] = true;
        }
        excluded[0] = false;
        (0..b).filter(|&x| !excluded[x as usize]).collect()
    }

    fn toggle(&self, v: VertexId, e: EdgeId, u: VertexId) -> Toggle {
        let (down, up) = if self.pos[u] > self.pos[v] {
            (false, true)
        } else if let Some(p) = self.pairs[u] {
            if self.w.sum[u] == p.low {
                (false, true)
            } else {
                (true, false)
            }
        } else {
            (true, true)
        };
        Toggle {
            edge: e,
            other: u,
            down,
            up,
        }
    }

    fn toggles(&self, v: VertexId, skip: &[EdgeId]) -> Vec<Toggle> {
        let mut t: Vec<Toggle> = self.adj[v]
            .iter()
            .filter(|(_, e)| !skip.contains(e))
            .map(|&(u, e)| self.toggle(v, e, u))
            .collect();
        t.sort_by_key(|t| t.edge);
        t
    }

    fn shift(&mut self, e: EdgeId, delta: i64) {
        if delta == 0 {
            return;
        }
        let c = self.w.edge[e] + delta;
        self.w.recolour(e, c);
        self.mods[e] += 1;
        self.stats.max_modifications = self.stats.max_modifications.max(self.mods[e]);
    }

    /// Applies a net toggle of `k·B` using the first `|k|` eligible edges.
    fn realize(&mut self, toggles: &[Toggle], k: i64) {
        let eligible = toggles.iter().filter(|t| if k < 0 { t.down } else { t.up });
        let picked: Vec<EdgeId> = eligible
            .take(k.unsigned_abs() as usize)
            .map(|t| t.edge)
            .collect();
        for e in picked {
            self.shift(e, k.signum() * self.b);
            self.stats.toggles += 1;
        }
    }

    fn held_by_neighbours(&self, v: VertexId) -> HashMap<i64, Vec<VertexId>> {
        let mut held: HashMap<i64, Vec<VertexId>> = HashMap::new();
        for u in self.g.neighbours(v) {
            if let Some(p) = self.pairs[u] {
                held.entry(p.low).or_default().push(u);
            }
        }
        held
    }

    fn assign(&mut self, v: VertexId) {
        let p = pair_of(self.w.sum[v], self.b);
        self.pairs[v] = Some(p);
        self.stats.assigned += 1;
    }

    fn generic(&mut self, v: VertexId) -> Result<(), PipelineError> {
        let (_, e_star) = *self.adj[v]
            .iter()
            .max_by_key(|(u, _)| self.pos[*u])
            .expect("non-root vertices have a later neighbour");
        let xs = self.residue_options(e_star);
        let toggles = self.toggles(v, &[e_star]);
        let downs = toggles.iter().filter(|t| t.down).count() as i64;
        let ups = toggles.iter().filter(|t| t.up).count() as i64;
        let held = self.held_by_neighbours(v);
        self.stats.max_blocked = self.stats.max_blocked.max(held.len());
        self.stats.min_options = self
            .stats
            .min_options
            .min(xs.len() * (downs + ups + 1) as usize);
        let s0 = self.w.sum[v];
        for k in -downs..=ups {
            for &x in &xs {
                let s = s0 + x + k * self.b;
                if held.contains_key(&pair_of(s, self.b).low) {
                    continue;
                }
                if x != 0 {
                    self.shift(e_star, x);
                    self.stats.residue_moves += 1;
                }
                self.realize(&toggles, k);
                debug_assert_eq!(self.w.sum[v], s);
                self.assign(v);
                return Ok(());
            }
        }
        Err(PipelineError::stage(
            Stage::Distinguish,
            format!(
                "no disjoint pair at vertex {v}: {} residues, {downs} down and {ups} up toggles, {} pairs held",
                xs.len(),
                held.len()
            ),
        ))
    }

    /// Places `v` into a pair by toggles alone. Prefers pairs no neighbour
    /// (other than `ignore`) holds, then pairs held by exactly one neighbour
    /// whose sum then differs from `v`'s. Returns that neighbour.
    fn settle(
        &mut self,
        v: VertexId,
        skip: &[EdgeId],
        ignore: Option<VertexId>,
    ) -> Result<Option<VertexId>, PipelineError> {
        let toggles = self.toggles(v, skip);
        let mut held = self.held_by_neighbours(v);
        if let Some(x) = ignore {
            held.values_mut().for_each(|list| list.retain(|&u| u != x));
            held.retain(|_, list| !list.is_empty());
        }
        let range = |ts: &[Toggle]| {
            (
                -(ts.iter().filter(|t| t.down).count() as i64),
                ts.iter().filter(|t| t.up).count() as i64,
            )
        };
        let (lo, hi) = range(&toggles);
        self.stats.max_blocked = self.stats.max_blocked.max(held.len());
        self.stats.min_options = self.stats.min_options.min((hi - lo + 1) as usize);
        let s0 = self.w.sum[v];
        if let Some(k) =
            (lo..=hi).find(|&k| !held.contains_key(&pair_of(s0 + k * self.b, self.b).low))
        {
            self.realize(&toggles, k);
            self.assign(v);
            return Ok(None);
        }
        for k in lo..=hi {
            let p = pair_of(s0 + k * self.b, self.b);
            let holders = &held[&p.low];
            if holders.len() != 1 {
                continue;
            }
            let partner = holders[0];
            let rest: Vec<Toggle> = toggles
                .iter()
                .copied()
                .filter(|t| t.other != partner)
                .collect();
            let (lo2, hi2) = range(&rest);
            let target = if self.w.sum[partner] == p.low {
                p.high
            } else {
                p.low
            };
            let k2 = (target - s0) / self.b;
            if (lo2..=hi2).contains(&k2) {
                self.realize(&rest, k2);
                debug_assert_eq!(self.w.sum[v], target);
                self.assign(v);
                self.shared.push((v, partner));
                self.stats.shared_pairs += 1;
                return Ok(Some(partner));
            }
        }
        Err(PipelineError::stage(
            Stage::Distinguish,
            format!(
                "no usable pair at final vertex {v}: toggles {lo}..={hi}, {} pairs held",
                held.len()
            ),
        ))
    }

    /// The last two vertices `a`, `b` of a component share the edge `ab`,
    /// which is the forward edge of `a`.
    fn last_two(&mut self, a: VertexId, b: VertexId) -> Result<(), PipelineError> {
        if !self.large[a] && !self.large[b] {
            return Ok(());
        }
        let e = self
            .g
            .edge_between(a, b)
            .expect("final two vertices are adjacent in H");
        let xs = self.residue_options(e);
        let counts = |v: VertexId| {
            let mut hist = vec![0usize; self.b as usize];
            for u in self.g.neighbours(v) {
                if self.pairs[u].is_some() {
                    hist[self.w.sum[u].rem_euclid(self.b) as usize] += 1;
                }
            }
            hist
        };
        let ends: Vec<(VertexId, Vec<usize>)> = [a, b]
            .into_iter()
            .filter(|&v| self.large[v])
            .map(|v| (v, counts(v)))
            .collect();
        let worst = |x: i64| {
            ends.iter()
                .map(|(v, hist)| hist[(self.w.sum[*v] + x).rem_euclid(self.b) as usize])
                .max()
                .unwrap_or(0)
        };
        let x = *xs
            .iter()
            .min_by_key(|&&x| (worst(x), x))
            .expect("residue 0 is always allowed");
        let limit = 2.0 * (self.delta as f64).sqrt() / 11.0;
        if worst(x) as f64 > limit {
            self.stats.residue_misses += 1;
        }
        if x != 0 {
            self.shift(e, x);
            self.stats.residue_moves += 1;
        }
        let mut partner = None;
        if self.large[a] {
            partner = self.settle(a, &[e], Some(b))?;
        }
        if self.large[b] {
            let mut skip = vec![e];
            if let Some(p) = partner {
                if let Some(f) = self.g.edge_between(b, p) {
                    skip.push(f);
                }
            }
            self.settle(b, &skip, None)?;
        }
        Ok(())
    }
}

/// Assigns every large vertex of `h` a pair of sums disjoint from those of
/// its assigned neighbours, modifying only `h` edges, each at most twice.
pub fn distinguish_large(
    g: &Graph,
    c: &TotalColouring,
    h: &Subgraph<'_>,
    ordering: &Ordering,
    b: i64,
    cls: &Classification<'_>,
) -> Result<(TotalColouring, PairAssignment, DistinguishStats), PipelineError> {
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in ordering.sequence().iter().enumerate() {
        pos[v] = i;
    }
    let mut sep = Separator {
        g,
        w: Work::new(g, c),
        b,
        adj: h.adjacency(),
        pos,
        large: &cls.large,
        touching: isolated_neighbour(g, &cls.isolated),
        mods: vec![0; g.m()],
        pairs: vec![None; g.n()],
        shared: Vec::new(),
        stats: DistinguishStats {
            min_options: usize::MAX,
            ..Default::default()
        },
        delta: cls.delta,
    };
    for comp in ordering.components() {
        sep.stats.components += 1;
        let n = comp.len();
        for &v in &comp[..n - 2] {
            if cls.large[v] {
                sep.generic(v)?;
            }
        }
        sep.last_two(comp[n - 2], comp[n - 1])?;
    }
    if sep.stats.min_options == usize::MAX {
        sep.stats.min_options = 0;
    }
    let stats = sep.stats.clone();
    let assignment = PairAssignment {
        pairs: sep.pairs,
        shared: sep.shared,
    };
    let out = sep.w.into_colouring();
    if let Err((u, v)) = assignment.check(g, &out.sums(g)) {
        return Err(PipelineError::stage(
            Stage::Distinguish,
            format!("pairs of adjacent large vertices {u} and {v} collide"),
        ));
    }
    Ok((out, assignment, stats))
}
