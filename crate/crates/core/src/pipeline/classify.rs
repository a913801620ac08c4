//! Degree classes and the small-degree subgraph.

use crate::graph::{EdgeId, Graph, Subgraph, VertexId};

use super::profile::{power, Profile};
use super::PipelineError;

/// Vertex classes by degree. `small`, `medium` and `large` are membership
/// masks indexed by vertex.
#[derive(Debug, Clone)]
pub struct Classification<'g> {
    pub delta: usize,
    pub small: Vec<bool>,
    pub medium: Vec<bool>,
    pub large: Vec<bool>,
    /// Subgraph induced by the small vertices.
    pub small_graph: Subgraph<'g>,
    /// Isolated edges of `small_graph`.
    pub isolated: Vec<EdgeId>,
    /// Degree bounds: small `≤ small_max`, medium `≥ medium_min`, large `≥ large_min`.
    pub small_max: f64,
    pub medium_min: f64,
    pub large_min: f64,
}

impl Classification<'_> {
    pub fn small_vertices(&self) -> Vec<VertexId> {
        members(&self.small)
    }

    pub fn medium_vertices(&self) -> Vec<VertexId> {
        members(&self.medium)
    }

    pub fn large_vertices(&self) -> Vec<VertexId> {
        members(&self.large)
    }
}

fn members(mask: &[bool]) -> Vec<VertexId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| v)
        .collect()
}

pub fn classify<'g>(g: &'g Graph, profile: &Profile) -> Result<Classification<'g>, PipelineError> {
    let delta = g.max_degree();
    if delta < profile.min_delta {
        return Err(PipelineError::DeltaTooSmall {
            delta,
            min: profile.min_delta,
        });
    }
    let d = delta as f64;
    let small_max = d * profile.small_frac;
    let medium_min = power(d, profile.medium_exp) + 1.0;
    let large_min = d * profile.large_frac;
    let deg = |v: VertexId| g.degree(v) as f64;
    let small: Vec<bool> = (0..g.n()).map(|v| deg(v) <= small_max).collect();
    let medium: Vec<bool> = (0..g.n())
        .map(|v| deg(v) >= medium_min && deg(v) <= small_max)
        .collect();
    let large: Vec<bool> = (0..g.n()).map(|v| deg(v) >= large_min).collect();
    let small_graph = Subgraph::induced(g, &small);
    let isolated = small_graph.isolated_edges();
    Ok(Classification {
        delta,
        small,
        medium,
        large,
        small_graph,
        isolated,
        small_max,
        medium_min,
        large_min,
    })
}
