//! Staged randomized construction of NSD colourings for graphs of large
//! maximum degree, with colours bounded by `Δ + O(√Δ)`.
//!
//! [`run`] chains the stages: starting colouring, degree classes, the
//! auxiliary graph and its recolouring, the base subgraph, residues mod `B`,
//! pair separation of large vertices and a final pass over the small part.

mod classify;
mod distinguish;
mod final_adjust;
mod initial;
mod preprocess;
mod profile;
mod sampling;
mod trace;

use std::collections::HashSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::colouring::{is_proper, verify_nsd, Colour, Mode, TotalColouring, VerificationReport};
use crate::graph::{EdgeId, Graph};

pub use classify::{classify, Classification};
pub use distinguish::{
    build_ordering, compute_b, distinguish_large, pair_of, recolour_mod_b, DistinguishStats,
    Ordering, Pair, PairAssignment, RecolourStats,
};
pub use final_adjust::{final_adjust, FinalStats};
pub use initial::{edge_colouring, initial_colouring};
pub use preprocess::{preprocess_small, PreprocessStats};
pub use profile::{power, Profile, StagePolicy};
pub use sampling::{sample_aux_graph, sample_base_subgraph, BaseWindow, SampleStats};
pub use trace::StageTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Initial,
    AuxSample,
    Preprocess,
    BaseSample,
    RecolourModB,
    Distinguish,
    FinalAdjust,
    Verify,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Initial => "initial",
            Stage::AuxSample => "aux_sample",
            Stage::Preprocess => "preprocess",
            Stage::BaseSample => "base_sample",
            Stage::RecolourModB => "recolour_mod_b",
            Stage::Distinguish => "distinguish",
            Stage::FinalAdjust => "final_adjust",
            Stage::Verify => "verify",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PipelineError {
    #[error("graph has an isolated edge; no NSD edge colouring exists")]
    IsolatedEdge,
    #[error("maximum degree {delta} is below the profile minimum {min}")]
    DeltaTooSmall { delta: usize, min: usize },
    #[error("profile is infeasible at this degree: {0}")]
    InfeasibleProfile(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("stage {stage} failed: {diagnostics}")]
    StageFailure {
        stage: Stage,
        diagnostics: String,
        trace: Option<Box<StageTrace>>,
    },
}

impl PipelineError {
    pub(crate) fn stage(stage: Stage, diagnostics: String) -> Self {
        PipelineError::StageFailure {
            stage,
            diagnostics,
            trace: None,
        }
    }

    fn with_trace(self, t: &StageTrace) -> Self {
        match self {
            PipelineError::StageFailure {
                stage, diagnostics, ..
            } => PipelineError::StageFailure {
                stage,
                diagnostics,
                trace: Some(Box::new(t.clone())),
            },
            other => other,
        }
    }

    /// Trace of the run up to the failing stage, when one was recorded.
    pub fn trace(&self) -> Option<&StageTrace> {
        match self {
            PipelineError::StageFailure { trace, .. } => trace.as_deref(),
            _ => None,
        }
    }
}

/// Signed working copy of a colouring with running sums.
pub(crate) struct Work<'g> {
    g: &'g Graph,
    mode: Mode,
    vertex: Vec<i64>,
    edge: Vec<i64>,
    sum: Vec<i64>,
}

impl<'g> Work<'g> {
    fn new(g: &'g Graph, c: &TotalColouring) -> Self {
        let vertex: Vec<i64> = c.vertex_colours().iter().map(|&x| x as i64).collect();
        let edge: Vec<i64> = c.edge_colours().iter().map(|&x| x as i64).collect();
        let sum = c.sums(g).into_iter().map(|x| x as i64).collect();
        Work {
            g,
            mode: c.mode(),
            vertex,
            edge,
            sum,
        }
    }

    fn recolour(&mut self, e: EdgeId, colour: i64) {
        let (u, v) = self.g.endpoints(e);
        let d = colour - self.edge[e];
        self.edge[e] = colour;
        self.sum[u] += d;
        self.sum[v] += d;
    }

    /// Colours `e` must avoid to stay proper.
    fn adjacent_colours(&self, e: EdgeId) -> HashSet<i64> {
        let (u, v) = self.g.endpoints(e);
        let mut out = HashSet::new();
        for x in [u, v] {
            if self.mode == Mode::Total {
                out.insert(self.vertex[x]);
            }
            for &(_, f) in self.g.incident(x) {
                if f != e {
                    out.insert(self.edge[f]);
                }
            }
        }
        out
    }

    fn into_colouring(self) -> TotalColouring {
        let to_colour = |x: i64| Colour::try_from(x).expect("colours stay positive");
        let vertex = self.vertex.into_iter().map(to_colour).collect();
        let edge = self.edge.into_iter().map(to_colour).collect();
        TotalColouring::from_parts(self.g, self.mode, vertex, edge)
            .expect("working colours stay valid")
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub colouring: TotalColouring,
    pub report: VerificationReport,
    pub trace: StageTrace,
}

/// Runs every stage on `g` with a ChaCha8 stream seeded by `seed`.
pub fn run(
    g: &Graph,
    mode: Mode,
    profile: &Profile,
    seed: u64,
) -> Result<RunOutput, PipelineError> {
    profile.validate()?;
    if mode == Mode::Edge && !g.isolated_edges().is_empty() {
        return Err(PipelineError::IsolatedEdge);
    }
    let cls = classify(g, profile)?;
    let delta = cls.delta;
    let window = BaseWindow::new(delta, profile);
    if window.lower <= 0.0 {
        return Err(PipelineError::InfeasibleProfile(format!(
            "base subgraph lower degree bound {:.3} is not positive at Δ={delta}",
            window.lower
        )));
    }
    let b = compute_b(delta, profile);
    let needed = 2 * window.upper.floor() as i64;
    if b < needed {
        return Err(PipelineError::InfeasibleProfile(format!(
            "B={b} leaves no free residue next to {} base edges; need B ≥ {needed}",
            window.upper.floor()
        )));
    }

    let mut trace = StageTrace::new(g, mode, profile, seed, b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let check = |trace: &mut StageTrace, stage: Stage, c: &TotalColouring| {
        let proper = is_proper(g, c);
        trace.proper.push((stage, proper));
        if proper {
            Ok(())
        } else {
            Err(PipelineError::stage(stage, "colouring is not proper".into()).with_trace(trace))
        }
    };

    let (c, k_eff) = initial_colouring(g, mode);
    trace.initial_max = c.max_colour();
    trace.k_eff = k_eff;
    check(&mut trace, Stage::Initial, &c)?;

    trace.classes = [
        cls.small.iter().filter(|&&x| x).count(),
        cls.medium.iter().filter(|&&x| x).count(),
        cls.large.iter().filter(|&&x| x).count(),
    ];
    trace.isolated = cls.isolated.len();

    let (aux, stats) =
        sample_aux_graph(g, &cls, profile, &mut rng).map_err(|e| e.with_trace(&trace))?;
    trace.aux = stats;
    let (c, stats) =
        preprocess_small(g, &c, &cls, &aux, profile).map_err(|e| e.with_trace(&trace))?;
    trace.preprocess = stats;
    check(&mut trace, Stage::Preprocess, &c)?;
    let m_prime = trace.preprocess.m_prime;

    let (h, stats) =
        sample_base_subgraph(g, &cls, profile, &mut rng).map_err(|e| e.with_trace(&trace))?;
    trace.base = stats;
    trace.base_window = Some(window);

    let (c, stats) =
        recolour_mod_b(g, &c, &h, b, &cls.isolated, m_prime).map_err(|e| e.with_trace(&trace))?;
    trace.recolour = stats;
    check(&mut trace, Stage::RecolourModB, &c)?;

    let ordering = build_ordering(&h);
    let (c, _pairs, stats) =
        distinguish_large(g, &c, &h, &ordering, b, &cls).map_err(|e| e.with_trace(&trace))?;
    trace.distinguish = stats;
    check(&mut trace, Stage::Distinguish, &c)?;

    let top = m_prime + 4 * b as u64;
    trace.relative_bound = top;
    let (c, stats) = final_adjust(g, &c, &cls, top);
    trace.final_adjust = stats;
    check(&mut trace, Stage::FinalAdjust, &c)?;

    let report = verify_nsd(g, &c);
    trace.max_colour = c.max_colour();
    trace.conflicts = report.conflicts.len();
    if !report.pass {
        let first = report.conflicts.first().copied();
        let diagnostics = match first {
            Some((u, v)) => format!(
                "{} adjacent pairs share a sum, first {u}-{v} (degrees {} and {})",
                report.conflicts.len(),
                g.degree(u),
                g.degree(v)
            ),
            None => "colouring is not proper".into(),
        };
        return Err(PipelineError::stage(Stage::Verify, diagnostics).with_trace(&trace));
    }
    Ok(RunOutput {
        colouring: c,
        report,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circulant(n: usize, d: usize) -> Graph {
        Graph::new(
            n,
            (0..n).flat_map(|i| (1..=d / 2).map(move |j| (i, (i + j) % n))),
        )
        .unwrap()
    }

    #[test]
    fn circulant_runs_in_both_modes() {
        let g = circulant(400, 64);
        for mode in [Mode::Edge, Mode::Total] {
            let out = run(&g, mode, &Profile::desk(), 11).unwrap();
            assert!(out.report.pass);
            assert!(out.trace.max_colour <= out.trace.relative_bound);
        }
    }

    #[test]
    fn applicability_errors() {
        let small = circulant(50, 10);
        assert!(matches!(
            run(&small, Mode::Edge, &Profile::desk(), 0),
            Err(PipelineError::DeltaTooSmall { .. })
        ));
        let mut edges: Vec<(usize, usize)> = (1..=64).map(|i| (0, i)).collect();
        edges.push((65, 66));
        let g = Graph::new(67, edges).unwrap();
        assert_eq!(
            run(&g, Mode::Edge, &Profile::desk(), 0).unwrap_err(),
            PipelineError::IsolatedEdge
        );
        let g = circulant(200, 64);
        assert!(matches!(
            run(&g, Mode::Edge, &Profile::paper(), 0),
            Err(PipelineError::InfeasibleProfile(_))
        ));
    }
}
