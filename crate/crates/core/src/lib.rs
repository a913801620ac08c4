//! Neighbour sum distinguishing (NSD) edge and total colourings.
//!
//! * [`graph`]: simple graphs, graph6 / edge-list input, subgraph queries.
//! * [`colouring`]: the colouring model and the properness / NSD verifier.
//! * [`exact`]: exhaustive search for the exact NSD indices of small graphs.
//! * [`prob`]: Local Lemma and Chernoff calculators, resampling driver.
//! * [`pipeline`]: the constructive `Δ + O(√Δ)` colouring algorithm.

pub mod colouring;
pub mod exact;
pub mod graph;
pub mod pipeline;
pub mod prob;

pub use colouring::{
    is_proper, total_sum, verify_nsd, weighted_degree, Mode, TotalColouring, VerificationReport,
};
pub use graph::{Format, Graph, GraphError, Subgraph};
