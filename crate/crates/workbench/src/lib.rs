//! Graph generators, the batch benchmark harness and the `nsd` command line.

pub mod bench;
pub mod cli;
pub mod generators;
pub mod repair;
