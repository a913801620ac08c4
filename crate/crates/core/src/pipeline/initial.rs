//! Starting colouring: a proper `Δ+1` edge colouring by fan rotation and
//! path inversion, then first-fit vertex colours in total mode.

use crate::colouring::{Colour, Mode, TotalColouring};
use crate::graph::{EdgeId, Graph, VertexId};

const NONE: usize = usize::MAX;

struct FanColouring<'g> {
    g: &'g Graph,
    k: usize,
    colour: Vec<usize>,
    /// `at[v*(k+1) + c]` is the edge at `v` coloured `c`, or `NONE`.
    at: Vec<usize>,
}

impl<'g> FanColouring<'g> {
    fn new(g: &'g Graph) -> Self {
        let k = g.max_degree() + 1;
        FanColouring {
            g,
            k,
            colour: vec![0; g.m()],
            at: vec![NONE; g.n() * (k + 1)],
        }
    }

    fn at(&self, v: VertexId, c: usize) -> usize {
        self.at[v * (self.k + 1) + c]
    }

    fn is_free(&self, v: VertexId, c: usize) -> bool {
        self.at(v, c) == NONE
    }

    fn free(&self, v: VertexId) -> usize {
        (1..=self.k)
            .find(|&c| self.is_free(v, c))
            .expect("a vertex misses at least one of Δ+1 colours")
    }

    fn unset(&mut self, e: EdgeId) {
        let c = self.colour[e];
        if c != 0 {
            let (u, v) = self.g.endpoints(e);
            let k1 = self.k + 1;
            self.at[u * k1 + c] = NONE;
            self.at[v * k1 + c] = NONE;
            self.colour[e] = 0;
        }
    }

    fn set(&mut self, e: EdgeId, c: usize) {
        self.unset(e);
        let (u, v) = self.g.endpoints(e);
        let k1 = self.k + 1;
        debug_assert!(self.at[u * k1 + c] == NONE && self.at[v * k1 + c] == NONE);
        self.at[u * k1 + c] = e;
        self.at[v * k1 + c] = e;
        self.colour[e] = c;
    }

    fn colour_edge(&mut self, e: EdgeId) {
        let (u, v) = self.g.endpoints(e);
        if let Some(c) = (1..=self.k).find(|&c| self.is_free(u, c) && self.is_free(v, c)) {
            self.set(e, c);
            return;
        }

        // maximal fan at u starting with v
        let mut fan = vec![v];
        let mut in_fan = vec![false; self.g.n()];
        in_fan[v] = true;
        'grow: loop {
            let last = *fan.last().unwrap();
            for c in 1..=self.k {
                if !self.is_free(last, c) {
                    continue;
                }
                let f = self.at(u, c);
                if f == NONE {
                    continue;
                }
                let x = self.g.opposite(f, u);
                if !in_fan[x] {
                    in_fan[x] = true;
                    fan.push(x);
                    continue 'grow;
                }
            }
            break;
        }

        let c = self.free(u);
        let d = self.free(*fan.last().unwrap());

        // invert the cd-path starting at u
        if !self.is_free(u, d) {
            let mut path = Vec::new();
            let (mut cur, mut col) = (u, d);
            loop {
                let f = self.at(cur, col);
                if f == NONE {
                    break;
                }
                path.push(f);
                cur = self.g.opposite(f, cur);
                col = if col == c { d } else { c };
            }
            let old: Vec<usize> = path.iter().map(|&f| self.colour[f]).collect();
            for &f in &path {
                self.unset(f);
            }
            for (&f, &col) in path.iter().zip(&old) {
                self.set(f, if col == c { d } else { c });
            }
        }

        // first fan vertex with d free whose prefix is still a fan
        let edge_to = |x: VertexId| {
            self.g
                .edge_between(u, x)
                .expect("fan vertices are neighbours")
        };
        let mut w = None;
        for i in 0..fan.len() {
            if i > 0 {
                let prev_ok = self.is_free(fan[i - 1], self.colour[edge_to(fan[i])]);
                if !prev_ok {
                    break;
                }
            }
            if self.is_free(fan[i], d) {
                w = Some(i);
                break;
            }
        }
        let w = w.expect("fan rotation target exists");
        for i in 0..w {
            let next = edge_to(fan[i + 1]);
            let col = self.colour[next];
            self.unset(next);
            self.set(edge_to(fan[i]), col);
        }
        self.set(edge_to(fan[w]), d);
    }
}

/// Proper edge colouring with colours in `1..=Δ+1`.
pub fn edge_colouring(g: &Graph) -> Vec<Colour> {
    let mut state = FanColouring::new(g);
    for e in 0..g.m() {
        state.colour_edge(e);
    }
    state.colour.iter().map(|&c| c as Colour).collect()
}

/// The starting proper colouring and its excess `K_eff = max colour − Δ`.
pub fn initial_colouring(g: &Graph, mode: Mode) -> (TotalColouring, i64) {
    let edge = edge_colouring(g);
    let vertex = match mode {
        Mode::Edge => vec![0; g.n()],
        Mode::Total => {
            let mut vertex: Vec<Colour> = vec![0; g.n()];
            let mut used = Vec::new();
            for v in 0..g.n() {
                used.clear();
                used.resize(2 * g.degree(v) + 2, false);
                for &(u, e) in g.incident(v) {
                    for c in [vertex[u], edge[e]] {
                        if (c as usize) < used.len() {
                            used[c as usize] = true;
                        }
                    }
                }
                vertex[v] = (1..used.len()).find(|&c| !used[c]).expect("first fit") as Colour;
            }
            vertex
        }
    };
    let c = TotalColouring::from_parts(g, mode, vertex, edge).expect("colours are positive");
    let k_eff = c.max_colour() as i64 - g.max_degree() as i64;
    (c, k_eff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::is_proper;
    use proptest::prelude::*;

    fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn triangle_uses_three_colours() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (c, k) = initial_colouring(&g, Mode::Edge);
        assert!(is_proper(&g, &c));
        assert_eq!(k, 1);
    }

    #[test]
    fn single_edge_total() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let (c, k) = initial_colouring(&g, Mode::Total);
        assert!(is_proper(&g, &c));
        assert_eq!(k, 2);
    }

    #[test]
    fn star_edges_are_distinct() {
        let g = star(5);
        let (c, _) = initial_colouring(&g, Mode::Edge);
        let mut cols = c.edge_colours().to_vec();
        cols.sort();
        assert_eq!(cols, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn dense_graphs_stay_within_delta_plus_one() {
        let g = Graph::new(9, (0..9).flat_map(|u| (u + 1..9).map(move |v| (u, v)))).unwrap();
        let (c, _) = initial_colouring(&g, Mode::Edge);
        assert!(is_proper(&g, &c));
        assert!(c.max_colour() <= 9);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..14).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut edges = Vec::new();
                let mut i = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[i] {
                            edges.push((u, v));
                        }
                        i += 1;
                    }
                }
                Graph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn edge_colouring_is_proper_with_delta_plus_one(g in arb_graph()) {
            let (c, k) = initial_colouring(&g, Mode::Edge);
            prop_assert!(is_proper(&g, &c));
            prop_assert!(c.max_colour() <= g.max_degree() as u64 + 1);
            prop_assert!(k <= 1);
        }

        #[test]
        fn total_start_is_proper(g in arb_graph()) {
            let (c, _) = initial_colouring(&g, Mode::Total);
            prop_assert!(is_proper(&g, &c));
        }
    }
}
