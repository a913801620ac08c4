//! Deterministic graph families and exhaustive enumeration of small
//! connected graphs.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use nsd_core::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("pairing model gave up after {0} restarts")]
    PairingCapExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Complete {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
    /// Centre plus `n − 1` leaves.
    Star {
        n: usize,
    },
    Gnp {
        n: usize,
        p: f64,
    },
    RandomRegular {
        n: usize,
        d: usize,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Complete { .. } => "complete",
            Family::Cycle { .. } => "cycle",
            Family::Path { .. } => "path",
            Family::Star { .. } => "star",
            Family::Gnp { .. } => "gnp",
            Family::RandomRegular { .. } => "random-regular",
        }
    }

    /// Builds a family from its name and the `n`, `p`, `d` parameters it uses.
    pub fn from_parts(
        name: &str,
        n: Option<usize>,
        p: Option<f64>,
        d: Option<usize>,
    ) -> Result<Self, GenError> {
        let need_n = || n.ok_or_else(|| GenError::InvalidParams(format!("{name} needs n")));
        Ok(match name {
            "complete" => Family::Complete { n: need_n()? },
            "cycle" => Family::Cycle { n: need_n()? },
            "path" => Family::Path { n: need_n()? },
            "star" => Family::Star { n: need_n()? },
            "gnp" => Family::Gnp {
                n: need_n()?,
                p: p.ok_or_else(|| GenError::InvalidParams("gnp needs p".into()))?,
            },
            "random-regular" => Family::RandomRegular {
                n: need_n()?,
                d: d.ok_or_else(|| GenError::InvalidParams("random-regular needs d".into()))?,
            },
            other => return Err(GenError::InvalidParams(format!("unknown family {other:?}"))),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Complete { n }
            | Family::Cycle { n }
            | Family::Path { n }
            | Family::Star { n } => {
                write!(f, "{}:n={n}", self.name())
            }
            Family::Gnp { n, p } => write!(f, "gnp:n={n},p={p}"),
            Family::RandomRegular { n, d } => write!(f, "random-regular:n={n},d={d}"),
        }
    }
}

/// Parses `name:key=value,...`, e.g. `random-regular:n=2000,d=64`.
impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let (mut n, mut p, mut d) = (None, None, None);
        let bad = |what: &str| GenError::InvalidParams(format!("{what} in {s:?}"));
        for kv in rest.split(',').filter(|x| !x.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            match k.trim() {
                "n" => n = Some(v.trim().parse().map_err(|_| bad("bad n"))?),
                "p" => p = Some(v.trim().parse().map_err(|_| bad("bad p"))?),
                "d" => d = Some(v.trim().parse().map_err(|_| bad("bad d"))?),
                _ => return Err(bad("unknown key")),
            }
        }
        Family::from_parts(name.trim(), n, p, d)
    }
}

const PAIRING_RESTARTS: usize = 100;

pub fn generate(family: &Family, seed: u64) -> Result<Graph, GenError> {
    let bad = |msg: String| Err(GenError::InvalidParams(msg));
    let graph =
        |n, edges: Vec<(usize, usize)>| Graph::new(n, edges).expect("generated edges are simple");
    match *family {
        Family::Complete { n } => Ok(graph(
            n,
            (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect(),
        )),
        Family::Cycle { n } => {
            if n < 3 {
                return bad(format!("cycle needs n ≥ 3, got {n}"));
            }
            Ok(graph(n, (0..n).map(|i| (i, (i + 1) % n)).collect()))
        }
        Family::Path { n } => Ok(graph(n, (1..n).map(|i| (i - 1, i)).collect())),
        Family::Star { n } => {
            if n == 0 {
                return bad("star needs n ≥ 1".into());
            }
            Ok(graph(n, (1..n).map(|i| (0, i)).collect()))
        }
        Family::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("gnp needs 0 ≤ p ≤ 1, got {p}"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(graph(n, edges))
        }
        Family::RandomRegular { n, d } => {
            if d >= n.max(1) || (n * d) % 2 == 1 {
                return bad(format!(
                    "random-regular needs d < n and n·d even, got n={n}, d={d}"
                ));
            }
            random_regular(n, d, seed)
        }
    }
}

/// Pairing model where each pair is drawn uniformly among the remaining
/// points and rejected on its own when it would form a loop or a repeated
/// edge; a run that gets stuck restarts from scratch.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..PAIRING_RESTARTS {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        points.shuffle(&mut rng);
        let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut misses = 0usize;
        while !points.is_empty() {
            let i = rng.gen_range(0..points.len());
            let j = rng.gen_range(0..points.len());
            let (u, v) = (points[i], points[j]);
            let key = (u.min(v), u.max(v));
            if i == j || u == v || seen.contains(&key) {
                misses += 1;
                if misses > 64 * points.len() + 1000 {
                    if !has_valid_pair(&points, &seen) {
                        continue 'attempt;
                    }
                    misses = 0;
                }
                continue;
            }
            misses = 0;
            seen.insert(key);
            edges.push(key);
            let (hi, lo) = (i.max(j), i.min(j));
            points.swap_remove(hi);
            points.swap_remove(lo);
        }
        return Ok(Graph::new(n, edges).expect("pairs are simple"));
    }
    Err(GenError::PairingCapExceeded(PAIRING_RESTARTS))
}

fn has_valid_pair(points: &[usize], seen: &HashSet<(usize, usize)>) -> bool {
    let mut vs: Vec<usize> = points.to_vec();
    vs.sort_unstable();
    vs.dedup();
    vs.iter()
        .enumerate()
        .any(|(i, &u)| vs[i + 1..].iter().any(|&v| !seen.contains(&(u, v))))
}

/// All connected graphs on `n` vertices up to isomorphism, each in its
/// canonical labelling (the edge mask that is smallest over all vertex
/// permutations). Practical for `n ≤ 7`.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "enumeration is exhaustive over all labelled graphs");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let perms = permutations(n);
    let mut canon: HashSet<u32> = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::new(n, edges.iter().copied()).expect("simple");
        if n > 1 && !g.is_connected() {
            continue;
        }
        let best = perms
            .iter()
            .map(|p| {
                edges
                    .iter()
                    .fold(0u32, |m, &(u, v)| m | 1 << index[p[u]][p[v]])
            })
            .min()
            .unwrap_or(0);
        if canon.insert(best) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| best >> i & 1 == 1)
                .map(|(_, &e)| e);
            out.push(Graph::new(n, edges).expect("simple"));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut p, &mut out);
    out
}

fn heap_permute(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, p, out);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        p.swap(j, k - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_families() {
        let c5 = generate(&Family::Cycle { n: 5 }, 0).unwrap();
        assert_eq!(c5.to_graph6(), "Dhc");
        let k4 = generate(&Family::Complete { n: 4 }, 0).unwrap();
        assert_eq!(k4.max_degree(), 3);
        assert_eq!(k4.m(), 6);
        let s = generate(&Family::Star { n: 6 }, 0).unwrap();
        assert_eq!(s.degree(0), 5);
        assert_eq!(generate(&Family::Path { n: 4 }, 0).unwrap().m(), 3);
    }

    #[test]
    fn parameter_errors() {
        assert!(generate(&Family::Cycle { n: 2 }, 0).is_err());
        assert!(generate(&Family::RandomRegular { n: 5, d: 3 }, 0).is_err());
        assert!(generate(&Family::RandomRegular { n: 4, d: 4 }, 0).is_err());
        assert!(generate(&Family::Gnp { n: 4, p: 1.5 }, 0).is_err());
        assert!("blob:n=3".parse::<Family>().is_err());
        assert!("gnp:n=3".parse::<Family>().is_err());
    }

    #[test]
    fn family_strings_round_trip() {
        for f in [
            Family::Complete { n: 4 },
            Family::Star { n: 9 },
            Family::Gnp { n: 10, p: 0.25 },
            Family::RandomRegular { n: 2000, d: 64 },
        ] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn random_regular_is_regular_and_reproducible() {
        let f = Family::RandomRegular { n: 10, d: 3 };
        let a = generate(&f, 5).unwrap();
        let b = generate(&f, 5).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!((0..10).all(|v| a.degree(v) == 3));
        let big = generate(&Family::RandomRegular { n: 300, d: 64 }, 1).unwrap();
        assert!((0..300).all(|v| big.degree(v) == 64));
    }

    #[test]
    fn gnp_is_reproducible() {
        let f = Family::Gnp { n: 30, p: 0.3 };
        assert_eq!(
            generate(&f, 8).unwrap().edges(),
            generate(&f, 8).unwrap().edges()
        );
        assert_ne!(
            generate(&f, 8).unwrap().edges(),
            generate(&f, 9).unwrap().edges()
        );
    }

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }
}
