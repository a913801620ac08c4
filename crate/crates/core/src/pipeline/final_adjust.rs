//! Last pass over the small-degree subgraph: an edge with a sum clash at
//! either end is moved to the smallest colour that clears it.

use std::collections::HashSet;

use crate::colouring::TotalColouring;
use crate::graph::{Graph, VertexId};

use super::classify::Classification;
use super::Work;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FinalStats {
    pub modified: usize,
    /// Clashing edges for which no colour up to the palette top helped.
    pub unresolved: usize,
}

/// Recolours edges of the small-degree subgraph, in id order, whose ends
/// clash with their other neighbours. Colours stay in `1..=top` and proper;
/// vertex colours are left alone.
pub fn final_adjust(
    g: &Graph,
    c: &TotalColouring,
    cls: &Classification<'_>,
    top: u64,
) -> (TotalColouring, FinalStats) {
    let mut w = Work::new(g, c);
    let mut stats = FinalStats::default();
    let others = |w: &Work<'_>, x: VertexId, skip: VertexId| -> HashSet<i64> {
        g.neighbours(x)
            .filter(|&y| y != skip)
            .map(|y| w.sum[y])
            .collect()
    };
    for &e in cls.small_graph.edges() {
        let (u, v) = g.endpoints(e);
        let near_u = others(&w, u, v);
        let near_v = others(&w, v, u);
        if !near_u.contains(&w.sum[u]) && !near_v.contains(&w.sum[v]) {
            continue;
        }
        let forbidden = w.adjacent_colours(e);
        let old = w.edge[e];
        let pick = (1..=top as i64).find(|&col| {
            !forbidden.contains(&col)
                && !near_u.contains(&(w.sum[u] - old + col))
                && !near_v.contains(&(w.sum[v] - old + col))
        });
        match pick {
            Some(col) => {
                if col != old {
                    w.recolour(e, col);
                    stats.modified += 1;
                }
            }
            None => stats.unresolved += 1,
        }
    }
    (w.into_colouring(), stats)
}
