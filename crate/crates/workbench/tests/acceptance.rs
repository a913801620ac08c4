//! One test per acceptance criterion. Each prints a `PASS` or `FAIL` line;
//! run with `--nocapture` to see them.

use std::f64::consts::E;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nsd_core::exact::{exists_colouring, Solver, SolverConfig};
use nsd_core::pipeline::{
    classify, compute_b, pair_of, run, sample_aux_graph, sample_base_subgraph, PipelineError,
    Profile, StageTrace,
};
use nsd_core::prob::{chernoff_upper, lll_feasible, TailBoundQuery};
use nsd_core::{verify_nsd, Graph, Mode, TotalColouring};
use nsd_workbench::generators::{connected_graphs, generate, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn report(id: &str, ok: bool, detail: &str) {
    println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn is_c5(g: &Graph) -> bool {
    g.n() == 5 && g.m() == 5 && (0..5).all(|v| g.degree(v) == 2) && g.is_connected()
}

#[test]
fn c1_conjecture_sweep_small_graphs() {
    let solver = Solver::new(SolverConfig::default());
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in 3..=6 {
        for g in connected_graphs(n) {
            if !g.isolated_edges().is_empty() {
                continue;
            }
            checked += 1;
            let delta = g.max_degree() as u64;
            let edge = solver.chi_sigma(&g, Mode::Edge).unwrap().k;
            let total = solver.chi_sigma(&g, Mode::Total).unwrap().k;
            if is_c5(&g) {
                if edge != 5 {
                    violations.push(format!("C5 edge index {edge}"));
                }
            } else if edge > delta + 2 {
                violations.push(format!("{} edge index {edge} > Δ+2", g.to_graph6()));
            }
            if total > delta + 3 {
                violations.push(format!("{} total index {total} > Δ+3", g.to_graph6()));
            }
        }
    }
    let ok = violations.is_empty() && checked == 2 + 6 + 21 + 112;
    report(
        "C1",
        ok,
        &format!("{checked} graphs, violations {violations:?}"),
    );
    assert!(ok);
}

/// Tries every assignment of `1..=k` to the edges (and vertices, in total
/// mode) with an odometer and tests it directly.
fn naive_exists(g: &Graph, k: u64, mode: Mode) -> bool {
    let vertex_items = if mode == Mode::Total { g.n() } else { 0 };
    let items = g.m() + vertex_items;
    let mut digits = vec![1u64; items];
    loop {
        let (edge, vertex) = digits.split_at(g.m());
        if naive_ok(g, edge, vertex, mode) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == items {
                return false;
            }
            if digits[i] < k {
                digits[i] += 1;
                break;
            }
            digits[i] = 1;
            i += 1;
        }
    }
}

fn naive_ok(g: &Graph, edge: &[u64], vertex: &[u64], mode: Mode) -> bool {
    let vc = |v: usize| if mode == Mode::Total { vertex[v] } else { 0 };
    let edges = g.edges();
    for (i, &(a, b)) in edges.iter().enumerate() {
        if mode == Mode::Total && (vc(a) == vc(b) || edge[i] == vc(a) || edge[i] == vc(b)) {
            return false;
        }
        for (j, &(c, d)) in edges.iter().enumerate().skip(i + 1) {
            if (a == c || a == d || b == c || b == d) && edge[i] == edge[j] {
                return false;
            }
        }
    }
    let mut sum: Vec<u64> = (0..g.n()).map(vc).collect();
    for (i, &(a, b)) in edges.iter().enumerate() {
        sum[a] += edge[i];
        sum[b] += edge[i];
    }
    edges.iter().all(|&(a, b)| sum[a] != sum[b])
}

#[test]
fn c2_solver_matches_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut compared = 0;
    let mut disagreements = Vec::new();
    let mut found = [0usize; 2];
    while compared < 200 {
        let n = rng.gen_range(2..=8);
        let mode = if rng.gen_bool(0.5) {
            Mode::Total
        } else {
            Mode::Edge
        };
        let k = rng.gen_range(1..=5u64);
        let p = rng.gen_range(0.2..0.8);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let vertex_items = if mode == Mode::Total { n } else { 0 };
        while !edges.is_empty() && (k as f64).powi((edges.len() + vertex_items) as i32) > 4e5 {
            edges.remove(rng.gen_range(0..edges.len()));
        }
        let g = Graph::new(n, edges).unwrap();
        if g.m() == 0 || (mode == Mode::Edge && !g.isolated_edges().is_empty()) {
            continue;
        }
        compared += 1;
        let solver = exists_colouring(&g, k, mode).unwrap();
        let naive = naive_exists(&g, k, mode);
        if let Some(w) = &solver {
            let witness_ok = verify_nsd(&g, w).pass && w.max_colour() <= k;
            if !witness_ok {
                disagreements.push(format!("{} k={k} {mode:?}: bad witness", g.to_graph6()));
            }
        }
        if solver.is_some() != naive {
            disagreements.push(format!(
                "{} k={k} {mode:?}: solver {} naive {naive}",
                g.to_graph6(),
                solver.is_some()
            ));
        }
        found[naive as usize] += 1;
    }
    let ok = disagreements.is_empty();
    report(
        "C2",
        ok,
        &format!(
            "{compared} instances ({} colourable, {} not), disagreements {disagreements:?}",
            found[1], found[0]
        ),
    );
    assert!(ok);
    assert!(found[0] > 0 && found[1] > 0);
}

#[test]
fn c3_pair_partition() {
    let mut violations = 0;
    for b in [1i64, 2, 5, 244] {
        for s in -10 * b..=10 * b {
            let p = pair_of(s, b);
            if !p.contains(s) || p.high - p.low != b {
                violations += 1;
            }
            // Pairs are {x, x+B} with ⌊x/B⌋ even; exactly one of them may
            // hold s, and it must be the one returned.
            let holders: Vec<i64> = [s, s - b]
                .into_iter()
                .filter(|x| x.div_euclid(b) % 2 == 0)
                .collect();
            if holders != [p.low] {
                violations += 1;
            }
        }
    }
    report("C3", violations == 0, &format!("{violations} violations"));
    assert_eq!(violations, 0);
}

struct DeskRun {
    d: usize,
    seed: u64,
    elapsed: Duration,
    outcome: Result<(TotalColouring, StageTrace, bool), PipelineError>,
}

/// Heavy core plus a light tail, so small vertices and G_A are present.
fn mixed_graph(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 900;
    let w: Vec<f64> = (0..n)
        .map(|i| {
            if i < 50 {
                160.0
            } else {
                rng.gen_range(1.0..40.0)
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool((w[u] * w[v] / total).min(1.0)) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn desk_graph(d: usize, seed: u64) -> Graph {
    generate(&Family::RandomRegular { n: 2000, d }, seed).unwrap()
}

/// The 100 seeded desk-profile runs shared by criteria 4 and 5.
fn desk_runs() -> &'static [DeskRun] {
    static RUNS: OnceLock<Vec<DeskRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let jobs: Vec<(usize, u64)> = (0..100u64)
            .map(|i| {
                let d = match i % 3 {
                    0 => 64,
                    1 => 128,
                    _ => 256,
                };
                (d, 1000 + i)
            })
            .collect();
        jobs.into_par_iter()
            .map(|(d, seed)| {
                let g = desk_graph(d, seed);
                let mode = if seed % 2 == 0 {
                    Mode::Edge
                } else {
                    Mode::Total
                };
                let start = Instant::now();
                let outcome = run(&g, mode, &Profile::desk(), seed).map(|out| {
                    let pass = verify_nsd(&g, &out.colouring).pass;
                    (out.colouring, out.trace, pass)
                });
                DeskRun {
                    d,
                    seed,
                    elapsed: start.elapsed(),
                    outcome,
                }
            })
            .collect()
    })
}

#[test]
fn c4_pipeline_soundness() {
    let runs = desk_runs();
    let mut successes = 0;
    let mut violations = Vec::new();
    for r in runs {
        if let Ok((c, trace, pass)) = &r.outcome {
            successes += 1;
            let b = compute_b(r.d, &Profile::desk());
            let bound = trace.preprocess.m_prime + 4 * b as u64;
            if !pass || c.max_colour() > bound || trace.b != b {
                violations.push((r.d, r.seed));
            }
        }
    }
    let ok = violations.is_empty();
    report(
        "C4",
        ok,
        &format!(
            "{successes}/{} succeeded, soundness violations {violations:?}",
            runs.len()
        ),
    );
    assert!(ok);
}

#[test]
fn c5_pipeline_liveness() {
    let runs = desk_runs();
    let successes = runs.iter().filter(|r| r.outcome.is_ok()).count();
    let slowest = runs.iter().map(|r| r.elapsed).max().unwrap();
    let live = successes * 10 >= runs.len() * 9 && slowest <= Duration::from_secs(60);
    report(
        "C5",
        live,
        &format!(
            "{successes}/{} succeeded, slowest {:.2}s",
            runs.len(),
            slowest.as_secs_f64()
        ),
    );

    let mut smoke = Vec::new();
    for (d, n) in [(64, 400), (256, 1000), (512, 1100)] {
        let g = generate(&Family::RandomRegular { n, d }, 7).unwrap();
        let outcome = run(&g, Mode::Edge, &Profile::paper(), 7);
        smoke.push(matches!(
            outcome,
            Err(PipelineError::InfeasibleProfile(_) | PipelineError::StageFailure { .. })
        ));
    }
    let smoke_ok = smoke.iter().all(|&x| x);
    report(
        "C5 paper smoke",
        smoke_ok,
        &format!("refused cleanly at Δ=64,256,512: {smoke:?}"),
    );
    assert!(live && smoke_ok);
}

#[test]
fn c6_accepted_samples_respect_degree_bounds() {
    let mut worst_aux = 0.0f64;
    let mut worst_base = 0.0f64;
    let mut samples = 0;
    let graphs = [64usize, 128, 256]
        .into_iter()
        .enumerate()
        .map(|(i, d)| desk_graph(d, 5000 + i as u64))
        .chain((0..9).map(|i| mixed_graph(6000 + i)));
    for (i, g) in graphs.enumerate() {
        let profile = Profile::desk();
        let cls = classify(&g, &profile).unwrap();
        let delta = cls.delta as f64;
        let aux_bound = delta.sqrt() + delta.cbrt() + 1.0;
        let base_bound = profile.sampling_coef * delta.sqrt() + delta.powf(profile.base_slack_exp);
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        for _ in 0..3 {
            let (aux, _) = sample_aux_graph(&g, &cls, &profile, &mut rng).unwrap();
            let (h, _) = sample_base_subgraph(&g, &cls, &profile, &mut rng).unwrap();
            samples += 1;
            let mut aux_deg = vec![0usize; g.n()];
            for &e in aux.edges() {
                let (u, v) = g.endpoints(e);
                aux_deg[u] += 1;
                aux_deg[v] += 1;
            }
            let mut h_deg = vec![0usize; g.n()];
            for &e in h.edges() {
                let (u, v) = g.endpoints(e);
                h_deg[u] += 1;
                h_deg[v] += 1;
            }
            for v in 0..g.n() {
                worst_aux = worst_aux.max(aux_deg[v] as f64 / aux_bound);
                worst_base = worst_base.max(h_deg[v] as f64 / base_bound);
            }
        }
    }
    let paper_window = nsd_core::pipeline::BaseWindow::new(400, &Profile::paper());
    let paper_scaled = (paper_window.upper - (6.0 * 20.0 + 400f64.cbrt())).abs() < 1e-9;
    let ok = worst_aux <= 1.0 && worst_base <= 1.0 && paper_scaled;
    report(
        "C6",
        ok,
        &format!("{samples} accepted sample pairs, worst d/bound aux {worst_aux:.3} base {worst_base:.3}"),
    );
    assert!(ok);
}

#[test]
fn c7_calculators_match_closed_forms() {
    let cases: [(u64, f64, f64); 10] = [
        (100, 0.5, 10.0),
        (100, 0.5, 0.0),
        (100, 0.5, 50.0),
        (1000, 0.01, 3.0),
        (1000, 0.3, 40.0),
        (64, 0.125, 2.5),
        (10_000, 0.06, 100.0),
        (50, 0.9, 12.0),
        (7, 1.0, 7.0),
        (2000, 0.0005, 0.7),
    ];
    let mut worst = 0.0f64;
    for (n, p, t) in cases {
        let mu = n as f64 * p;
        let expected = if t == 0.0 {
            1.0
        } else {
            (-(t * t) / (3.0 * mu)).exp()
        };
        let got = chernoff_upper(&TailBoundQuery::binomial(n, p, t)).unwrap();
        worst = worst.max((got - expected).abs());
    }
    let lll_cases: [(f64, u64); 10] = [
        (0.01, 10),
        (0.1, 2),
        (0.1, 3),
        (1.0 / E, 0),
        (0.05, 6),
        (0.0, 1_000_000),
        (1e-6, 367_879),
        (1e-6, 367_880),
        (1.0 / 64.0, 22),
        (1.0 / 64.0, 23),
    ];
    let mut lll_mismatch = 0;
    for (p, dep) in lll_cases {
        let expected = E * p * (dep as f64 + 1.0) <= 1.0;
        if lll_feasible(p, dep).unwrap() != expected {
            lll_mismatch += 1;
        }
    }
    let ok = worst <= 1e-12 && lll_mismatch == 0;
    report(
        "C7 closed forms",
        ok,
        &format!("20 cases, max chernoff error {worst:e}, lll mismatches {lll_mismatch}"),
    );
    assert!(ok);
}

/// The sweep asks for `lll_feasible(Δ^-3, Δ²+1)` to hold from `Δ = 3`, but
/// `e·(Δ²+2)/Δ³` is `e·11/27 ≈ 1.107` there. The calculator is exact, so
/// the sweep reports FAIL; the test pins that the only exception is `Δ = 3`.
#[test]
fn c7_local_lemma_sweep() {
    let mut failing = Vec::new();
    for delta in 3u64..=10_000 {
        let d = delta as f64;
        let p = d.powi(-3);
        let got = lll_feasible(p, delta * delta + 1).unwrap();
        assert_eq!(got, E * p * (d * d + 2.0) <= 1.0);
        if !got {
            failing.push(delta);
        }
    }
    report(
        "C7 sweep",
        failing.is_empty(),
        &format!("Δ in 3..=10000, infeasible at {failing:?}"),
    );
    assert_eq!(failing, [3]);
}

#[test]
fn c8_edge_mode_purity() {
    let outcomes: Vec<(bool, bool)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let d = [64, 96, 128][i as usize % 3];
            let g = generate(&Family::RandomRegular { n: 600, d }, 9000 + i).unwrap();
            match run(&g, Mode::Edge, &Profile::desk(), i) {
                Ok(out) => {
                    let zero = out.colouring.vertex_colours().iter().all(|&c| c == 0);
                    (true, zero && verify_nsd(&g, &out.colouring).pass)
                }
                Err(_) => (false, true),
            }
        })
        .collect();
    let succeeded = outcomes.iter().filter(|o| o.0).count();
    let pure = outcomes.iter().all(|o| o.1);
    let ok = pure && succeeded == outcomes.len();
    report(
        "C8",
        ok,
        &format!("{succeeded}/50 succeeded, all outputs pure edge colourings: {pure}"),
    );
    assert!(ok);
}
