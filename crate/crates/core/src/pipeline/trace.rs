//! Per-stage record of a pipeline run.

use std::fmt;

use crate::colouring::Mode;
use crate::graph::Graph;

use super::distinguish::{DistinguishStats, RecolourStats};
use super::final_adjust::FinalStats;
use super::preprocess::PreprocessStats;
use super::profile::Profile;
use super::sampling::{BaseWindow, SampleStats};
use super::Stage;

#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub mode: Mode,
    pub profile: String,
    pub seed: u64,
    pub b: i64,
    pub initial_max: u64,
    pub k_eff: i64,
    /// Sizes of the small, medium and large classes.
    pub classes: [usize; 3],
    pub isolated: usize,
    pub aux: SampleStats,
    pub preprocess: PreprocessStats,
    pub base: SampleStats,
    pub base_window: Option<BaseWindow>,
    pub recolour: RecolourStats,
    pub distinguish: DistinguishStats,
    pub final_adjust: FinalStats,
    /// `m' + 4B`.
    pub relative_bound: u64,
    pub max_colour: u64,
    pub conflicts: usize,
    /// Properness at each stage boundary checked so far.
    pub proper: Vec<(Stage, bool)>,
}

impl StageTrace {
    pub fn new(g: &Graph, mode: Mode, profile: &Profile, seed: u64, b: i64) -> Self {
        StageTrace {
            n: g.n(),
            m: g.m(),
            delta: g.max_degree(),
            mode,
            profile: profile.name.clone(),
            seed,
            b,
            initial_max: 0,
            k_eff: 0,
            classes: [0; 3],
            isolated: 0,
            aux: SampleStats::default(),
            preprocess: PreprocessStats::default(),
            base: SampleStats::default(),
            base_window: None,
            recolour: RecolourStats::default(),
            distinguish: DistinguishStats::default(),
            final_adjust: FinalStats::default(),
            relative_bound: 0,
            max_colour: 0,
            conflicts: 0,
            proper: Vec::new(),
        }
    }

    /// Redraw count summed over both sampling stages.
    pub fn restarts(&self) -> usize {
        self.aux.restarts + self.base.restarts
    }

    /// Flat `stage.key` / value pairs in a fixed order.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("graph.n", self.n.to_string());
        put("graph.m", self.m.to_string());
        put("graph.delta", self.delta.to_string());
        put("run.mode", self.mode.to_string());
        put("run.profile", self.profile.clone());
        put("run.seed", self.seed.to_string());
        put("initial.max_colour", self.initial_max.to_string());
        put("initial.k_eff", self.k_eff.to_string());
        put("classify.small", self.classes[0].to_string());
        put("classify.medium", self.classes[1].to_string());
        put("classify.large", self.classes[2].to_string());
        put("classify.isolated_edges", self.isolated.to_string());
        for (name, s) in [("aux", &self.aux), ("base", &self.base)] {
            put(&format!("{name}.edges"), s.edges.to_string());
            put(&format!("{name}.max_degree"), s.max_degree.to_string());
            put(&format!("{name}.bound"), format!("{:.3}", s.bound));
            put(&format!("{name}.restarts"), s.restarts.to_string());
            put(&format!("{name}.rounds"), s.rounds.to_string());
        }
        put(
            "preprocess.recoloured",
            self.preprocess.aux_recoloured.to_string(),
        );
        put("preprocess.fixups", self.preprocess.fixups.to_string());
        put("preprocess.m_prime", self.preprocess.m_prime.to_string());
        put("preprocess.bound", format!("{:.3}", self.preprocess.bound));
        if let Some(w) = &self.base_window {
            put("base.p", format!("{:.6}", w.p));
            put("base.lower", format!("{:.3}", w.lower));
        }
        put("recolour.b", self.b.to_string());
        put("recolour.edges", self.recolour.recoloured.to_string());
        put(
            "recolour.max_excluded",
            self.recolour.max_excluded.to_string(),
        );
        let d = &self.distinguish;
        put("distinguish.components", d.components.to_string());
        put("distinguish.assigned", d.assigned.to_string());
        put("distinguish.toggles", d.toggles.to_string());
        put("distinguish.residue_moves", d.residue_moves.to_string());
        put(
            "distinguish.max_modifications",
            d.max_modifications.to_string(),
        );
        put("distinguish.min_options", d.min_options.to_string());
        put("distinguish.max_blocked", d.max_blocked.to_string());
        put("distinguish.shared_pairs", d.shared_pairs.to_string());
        put("distinguish.residue_misses", d.residue_misses.to_string());
        put("final.modified", self.final_adjust.modified.to_string());
        put("final.unresolved", self.final_adjust.unresolved.to_string());
        put("final.max_colour", self.max_colour.to_string());
        put("final.relative_bound", self.relative_bound.to_string());
        put("final.conflicts", self.conflicts.to_string());
        for (stage, ok) in &self.proper {
            put(&format!("{stage}.proper"), ok.to_string());
        }
        out
    }
}

impl fmt::Display for StageTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.to_key_values() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
