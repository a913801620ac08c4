//! Recolours the auxiliary graph with fresh colours and separates the sums
//! across the isolated edges of the small part.

use crate::colouring::TotalColouring;
use crate::graph::{EdgeId, Graph, Subgraph};

use super::classify::Classification;
use super::profile::{power, Profile};
use super::{PipelineError, Stage, Work};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PreprocessStats {
    pub m0: u64,
    pub m_prime: u64,
    pub aux_recoloured: usize,
    pub fixups: usize,
    /// `m0 + 2(Δ^medium_exp + Δ^aux_slack_exp + 1) + 2`.
    pub bound: f64,
}

/// For each edge, the isolated edges of the small part it touches (at most one).
pub(crate) fn isolated_neighbour(g: &Graph, isolated: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    let mut out = vec![Vec::new(); g.m()];
    for &f in isolated {
        let (a, b) = g.endpoints(f);
        for x in [a, b] {
            for &(_, e) in g.incident(x) {
                if e != f {
                    out[e].push(f);
                }
            }
        }
    }
    out
}

/// Shared end of `e` and `f`, then the other end of `f`.
pub(crate) fn split_at(g: &Graph, e: EdgeId, f: EdgeId) -> (usize, usize) {
    let (a, b) = g.endpoints(f);
    let (x, y) = g.endpoints(e);
    if a == x || a == y {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn preprocess_small(
    g: &Graph,
    c: &TotalColouring,
    cls: &Classification<'_>,
    aux: &Subgraph<'_>,
    profile: &Profile,
) -> Result<(TotalColouring, PreprocessStats), PipelineError> {
    let mut w = Work::new(g, c);
    let m0 = c.max_colour();
    let touching = isolated_neighbour(g, &cls.isolated);
    let mut last_aux = vec![None; g.m()];
    for &e in aux.edges() {
        for &f in &touching[e] {
            last_aux[f] = Some(e);
        }
    }

    let mut stats = PreprocessStats {
        m0,
        ..Default::default()
    };
    for &e in aux.edges() {
        let guards: Vec<(usize, usize)> = touching[e]
            .iter()
            .filter(|&&f| last_aux[f] == Some(e))
            .map(|&f| split_at(g, e, f))
            .collect();
        let forbidden = w.adjacent_colours(e);
        let old = w.edge[e];
        let mut colour = m0 as i64 + 1;
        loop {
            let clash = forbidden.contains(&colour)
                || guards
                    .iter()
                    .any(|&(t, o)| w.sum[t] - old + colour == w.sum[o]);
            if !clash {
                break;
            }
            colour += 1;
        }
        w.recolour(e, colour);
        stats.aux_recoloured += 1;
    }

    let d = cls.delta as f64;
    let top = cls.delta as i64 + power(d, profile.medium_exp).ceil() as i64 + 3;
    for &f in &cls.isolated {
        let (a, b) = g.endpoints(f);
        if w.sum[a] != w.sum[b] {
            continue;
        }
        let Some(e) = g
            .incident(a)
            .iter()
            .chain(g.incident(b))
            .map(|&(_, e)| e)
            .filter(|&e| e != f)
            .min()
        else {
            return Err(PipelineError::stage(
                Stage::Preprocess,
                format!("isolated edge {a}-{b} has no adjacent edge to recolour"),
            ));
        };
        let (t, o) = split_at(g, e, f);
        let forbidden = w.adjacent_colours(e);
        let old = w.edge[e];
        let pick =
            (1..=top).find(|&col| !forbidden.contains(&col) && w.sum[t] - old + col != w.sum[o]);
        let Some(col) = pick else {
            return Err(PipelineError::stage(
                Stage::Preprocess,
                format!("no colour in 1..={top} separates the sums across edge {a}-{b}"),
            ));
        };
        w.recolour(e, col);
        stats.fixups += 1;
    }

    let out = w.into_colouring();
    stats.m_prime = out.max_colour();
    stats.bound = m0 as f64
        + 2.0 * (power(d, profile.medium_exp) + power(d, profile.aux_slack_exp) + 1.0)
        + 2.0;
    if stats.m_prime as f64 > stats.bound {
        return Err(PipelineError::stage(
            Stage::Preprocess,
            format!(
                "largest colour {} exceeds {:.3}",
                stats.m_prime, stats.bound
            ),
        ));
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{is_proper, Mode};
    use crate::pipeline::classify::classify;
    use crate::pipeline::initial::initial_colouring;
    use crate::pipeline::sampling::sample_aux_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two hubs of degree 64; their leaves form paths and isolated edges.
    fn two_hubs() -> Graph {
        let mut edges: Vec<(usize, usize)> = (1..=64).map(|i| (0, i)).collect();
        edges.extend((66..130).map(|i| (65, i)));
        for i in (1..64).step_by(2) {
            edges.push((i, i + 1));
        }
        for i in 66..129 {
            edges.push((i, i + 1));
        }
        Graph::new(130, edges).unwrap()
    }

    #[test]
    fn isolated_edges_get_distinct_sums() {
        let g = two_hubs();
        let profile = Profile::desk();
        let cls = classify(&g, &profile).unwrap();
        assert_eq!(cls.isolated.len(), 32);
        for mode in [Mode::Edge, Mode::Total] {
            let (c, _) = initial_colouring(&g, mode);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let (aux, _) = sample_aux_graph(&g, &cls, &profile, &mut rng).unwrap();
            let (out, stats) = preprocess_small(&g, &c, &cls, &aux, &profile).unwrap();
            assert!(is_proper(&g, &out));
            let sums = out.sums(&g);
            for &f in &cls.isolated {
                let (a, b) = g.endpoints(f);
                assert_ne!(sums[a], sums[b]);
            }
            assert!(stats.m_prime as f64 <= stats.bound);
        }
    }
}
