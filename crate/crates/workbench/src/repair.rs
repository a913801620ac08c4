//! Greedy fallback for graphs outside the pipeline's range: start from a
//! proper colouring and sweep the edges, moving each edge with a sum clash
//! at an end to the smallest colour that clears it.

use std::collections::HashSet;

use nsd_core::pipeline::initial_colouring;
use nsd_core::{verify_nsd, Graph, Mode, TotalColouring};

/// Returns a verified NSD colouring, or `None` if `max_sweeps` passes leave
/// a clash (or the graph has an isolated edge in edge mode).
pub fn greedy_repair(g: &Graph, mode: Mode, max_sweeps: usize) -> Option<(TotalColouring, usize)> {
    if mode == Mode::Edge && !g.isolated_edges().is_empty() {
        return None;
    }
    let (mut c, _) = initial_colouring(g, mode);
    for sweep in 0..=max_sweeps {
        if verify_nsd(g, &c).pass {
            return Some((c, sweep));
        }
        if sweep == max_sweeps {
            break;
        }
        let mut sums: Vec<u64> = c.sums(g);
        for e in 0..g.m() {
            let (u, v) = g.endpoints(e);
            let clash = |x: usize, sums: &[u64]| g.neighbours(x).any(|y| sums[y] == sums[x]);
            if !clash(u, &sums) && !clash(v, &sums) {
                continue;
            }
            let near = |x: usize, skip: usize| -> HashSet<u64> {
                g.neighbours(x)
                    .filter(|&y| y != skip)
                    .map(|y| sums[y])
                    .collect()
            };
            let (near_u, near_v) = (near(u, v), near(v, u));
            let mut used: HashSet<u64> = HashSet::new();
            for x in [u, v] {
                if mode == Mode::Total {
                    used.insert(c.vertex_colour(x));
                }
                used.extend(
                    g.incident(x)
                        .iter()
                        .filter(|&&(_, f)| f != e)
                        .map(|&(_, f)| c.edge_colour(f)),
                );
            }
            let old = c.edge_colour(e);
            let fits = |col: u64| {
                !used.contains(&col)
                    && !near_u.contains(&(sums[u] - old + col))
                    && !near_v.contains(&(sums[v] - old + col))
            };
            // at most 2Δ colours are used nearby and 2Δ sums are blocked
            let top = 4 * g.max_degree() as u64 + 4;
            if let Some(col) = (1..=top).find(|&col| fits(col)) {
                if col != old {
                    c.set_edge(e, col);
                    sums[u] = sums[u] - old + col;
                    sums[v] = sums[v] - old + col;
                }
            }
        }
    }
    None
}
