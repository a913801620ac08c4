//! The two random subgraphs: the auxiliary graph `G_A` (one edge per medium
//! vertex) and the base subgraph `H` (edges at large vertices kept with
//! probability `s/√Δ`).

use rand::Rng;

use crate::graph::{EdgeId, Graph, Subgraph, VertexId};
use crate::prob::{resample, Sampler};

use super::classify::Classification;
use super::profile::{power, Profile};
use super::{PipelineError, Stage};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleStats {
    pub restarts: usize,
    pub rounds: usize,
    pub edges: usize,
    pub max_degree: usize,
    /// Degree bound checked at acceptance.
    pub bound: f64,
}

struct AuxSampler<'a> {
    g: &'a Graph,
    /// Medium vertices and the edges each may pick.
    pickers: Vec<(VertexId, Vec<EdgeId>)>,
    slot: Vec<Option<usize>>,
}

impl Sampler for AuxSampler<'_> {
    type Candidate = Vec<EdgeId>;
    type Location = VertexId;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<EdgeId> {
        self.pickers
            .iter()
            .map(|(_, opts)| opts[rng.gen_range(0..opts.len())])
            .collect()
    }

    fn redraw<R: Rng + ?Sized>(&self, c: &mut Vec<EdgeId>, violated: &[VertexId], rng: &mut R) {
        for &v in violated {
            for x in std::iter::once(v).chain(self.g.neighbours(v)) {
                if let Some(i) = self.slot[x] {
                    let opts = &self.pickers[i].1;
                    c[i] = opts[rng.gen_range(0..opts.len())];
                }
            }
        }
    }
}

fn picked_degrees(g: &Graph, picks: &[EdgeId]) -> (Vec<EdgeId>, Vec<usize>) {
    let mut edges = picks.to_vec();
    edges.sort_unstable();
    edges.dedup();
    let mut deg = vec![0; g.n()];
    for &e in &edges {
        let (u, v) = g.endpoints(e);
        deg[u] += 1;
        deg[v] += 1;
    }
    (edges, deg)
}

/// Samples `G_A`: every medium vertex picks one incident edge outside the
/// isolated edges of the small part, and the result is accepted when no
/// vertex has `G_A`-degree above `Δ^medium_exp + Δ^aux_slack_exp + 1`.
pub fn sample_aux_graph<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    cls: &Classification<'g>,
    profile: &Profile,
    rng: &mut R,
) -> Result<(Subgraph<'g>, SampleStats), PipelineError> {
    let d = cls.delta as f64;
    let bound = power(d, profile.medium_exp) + power(d, profile.aux_slack_exp) + 1.0;
    let mut excluded = vec![false; g.m()];
    for &e in &cls.isolated {
        excluded[e] = true;
    }
    let mut pickers = Vec::new();
    let mut slot = vec![None; g.n()];
    for v in cls.medium_vertices() {
        let opts: Vec<EdgeId> = g
            .incident(v)
            .iter()
            .map(|&(_, e)| e)
            .filter(|&e| !excluded[e])
            .collect();
        if !opts.is_empty() {
            slot[v] = Some(pickers.len());
            pickers.push((v, opts));
        }
    }
    let sampler = AuxSampler { g, pickers, slot };
    let predicate = |picks: &Vec<EdgeId>| {
        let (_, deg) = picked_degrees(g, picks);
        (0..g.n())
            .filter(|&v| deg[v] as f64 > bound)
            .collect::<Vec<_>>()
    };
    let policy = profile.aux_policy.resolve(g.n());
    match resample(&sampler, predicate, policy, rng) {
        Ok(done) => {
            let (edges, deg) = picked_degrees(g, &done.candidate);
            let stats = SampleStats {
                restarts: done.restarts,
                rounds: done.rounds,
                edges: edges.len(),
                max_degree: deg.iter().copied().max().unwrap_or(0),
                bound,
            };
            Ok((Subgraph::new(g, edges), stats))
        }
        Err(e) => Err(PipelineError::stage(
            Stage::AuxSample,
            format!(
                "no auxiliary graph within degree bound {bound:.3} after {} redraws; best draw had {} violations",
                e.restarts, e.best_violations
            ),
        )),
    }
}

/// Acceptance window of the base subgraph at one `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseWindow {
    pub p: f64,
    pub slack: f64,
    /// Every vertex: `d_H ≤ upper`.
    pub upper: f64,
    /// Every large vertex: `d_H ≥ lower`.
    pub lower: f64,
    /// Cap for vertices outside `V_L`.
    pub outside: f64,
}

impl BaseWindow {
    pub fn new(delta: usize, profile: &Profile) -> Self {
        let d = delta as f64;
        let p = (profile.sampling_coef / d.sqrt()).min(1.0);
        let slack = power(d, profile.base_slack_exp);
        BaseWindow {
            p,
            slack,
            upper: p * d + slack,
            lower: p * d * profile.large_frac - slack,
            outside: p * d * profile.large_frac + slack,
        }
    }
}

struct BaseSampler<'a> {
    g: &'a Graph,
    eligible: Vec<EdgeId>,
    slot: Vec<usize>,
    p: f64,
}

impl Sampler for BaseSampler<'_> {
    type Candidate = Vec<bool>;
    type Location = VertexId;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        self.eligible.iter().map(|_| rng.gen_bool(self.p)).collect()
    }

    fn redraw<R: Rng + ?Sized>(&self, c: &mut Vec<bool>, violated: &[VertexId], rng: &mut R) {
        for &v in violated {
            for &(_, e) in self.g.incident(v) {
                let i = self.slot[e];
                if i != usize::MAX {
                    c[i] = rng.gen_bool(self.p);
                }
            }
        }
    }
}

/// Samples `H`: each edge with an end in `V_L` independently with
/// probability `p`. Accepted when every large vertex has
/// `|d_H − p·d_G| ≤ slack` and every other vertex `d_H ≤ p·Δ·large_frac + slack`.
pub fn sample_base_subgraph<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    cls: &Classification<'g>,
    profile: &Profile,
    rng: &mut R,
) -> Result<(Subgraph<'g>, SampleStats), PipelineError> {
    let window = BaseWindow::new(cls.delta, profile);
    if window.lower <= 0.0 {
        return Err(PipelineError::InfeasibleProfile(format!(
            "base subgraph lower degree bound {:.3} is not positive at Δ={}",
            window.lower, cls.delta
        )));
    }
    let eligible: Vec<EdgeId> = (0..g.m())
        .filter(|&e| {
            let (u, v) = g.endpoints(e);
            cls.large[u] || cls.large[v]
        })
        .collect();
    let mut slot = vec![usize::MAX; g.m()];
    for (i, &e) in eligible.iter().enumerate() {
        slot[e] = i;
    }
    let degrees = |keep: &Vec<bool>| {
        let mut deg = vec![0usize; g.n()];
        for (i, &e) in eligible.iter().enumerate() {
            if keep[i] {
                let (u, v) = g.endpoints(e);
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        deg
    };
    let violated_at = |deg: &[usize], v: VertexId| {
        let d = deg[v] as f64;
        if cls.large[v] {
            (d - window.p * g.degree(v) as f64).abs() > window.slack
        } else {
            d > window.outside
        }
    };
    let predicate = |keep: &Vec<bool>| {
        let deg = degrees(keep);
        (0..g.n())
            .filter(|&v| violated_at(&deg, v))
            .collect::<Vec<_>>()
    };
    let sampler = BaseSampler {
        g,
        eligible: eligible.clone(),
        slot,
        p: window.p,
    };
    let policy = profile.base_policy.resolve(g.n());
    match resample(&sampler, predicate, policy, rng) {
        Ok(done) => {
            let deg = degrees(&done.candidate);
            let edges: Vec<EdgeId> =
                eligible.iter().zip(&done.candidate).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            let stats = SampleStats {
                restarts: done.restarts,
                rounds: done.rounds,
                edges: edges.len(),
                max_degree: deg.iter().copied().max().unwrap_or(0),
                bound: window.upper,
            };
            Ok((Subgraph::new(g, edges), stats))
        }
        Err(e) => Err(PipelineError::stage(
            Stage::BaseSample,
            format!(
                "no base subgraph within the degree window after {} redraws; best draw had {} violations",
                e.restarts, e.best_violations
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::classify::classify;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Circulant graph where each vertex is joined to the next `d/2` vertices.
    fn circulant(n: usize, d: usize) -> Graph {
        Graph::new(
            n,
            (0..n).flat_map(|i| (1..=d / 2).map(move |j| (i, (i + j) % n))),
        )
        .unwrap()
    }

    #[test]
    fn base_window_values() {
        let w = BaseWindow::new(64, &Profile::desk());
        assert_eq!(w.p, 0.75);
        assert_eq!(w.upper, 56.0);
        assert_eq!(w.lower, 4.0);
        let w = BaseWindow::new(64, &Profile::paper());
        assert!(w.lower < 0.0);
    }

    #[test]
    fn base_subgraph_respects_window() {
        let g = circulant(300, 64);
        let profile = Profile::desk();
        let cls = classify(&g, &profile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (h, stats) = sample_base_subgraph(&g, &cls, &profile, &mut rng).unwrap();
        let w = BaseWindow::new(64, &profile);
        for v in 0..g.n() {
            assert!((h.degree(v) as f64 - w.p * 64.0).abs() <= w.slack);
        }
        assert_eq!(stats.edges, h.len());
    }

    #[test]
    fn paper_profile_is_infeasible_at_small_delta() {
        let g = circulant(200, 64);
        let profile = Profile::paper();
        let cls = classify(&g, &profile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            sample_base_subgraph(&g, &cls, &profile, &mut rng),
            Err(PipelineError::InfeasibleProfile(_))
        ));
    }

    #[test]
    fn aux_graph_picks_one_edge_per_medium_vertex() {
        // hub with 64 leaves plus a 12-regular circulant on the leaves
        let mut edges: Vec<(usize, usize)> = (1..=64).map(|i| (0, i)).collect();
        for i in 0..64 {
            for j in 1..=6 {
                edges.push((1 + i, 1 + (i + j) % 64));
            }
        }
        let g = Graph::new(65, edges).unwrap();
        let profile = Profile::desk();
        let cls = classify(&g, &profile).unwrap();
        assert_eq!(cls.medium_vertices().len(), 64);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (ga, stats) = sample_aux_graph(&g, &cls, &profile, &mut rng).unwrap();
        for v in cls.medium_vertices() {
            assert!(g.incident(v).iter().any(|&(_, e)| ga.contains(e)));
        }
        assert!(stats.max_degree as f64 <= stats.bound);
    }
}
