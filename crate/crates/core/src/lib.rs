//! Workload-aware layout optimization for temporal graph disk blocks.
//!
//! A block stores temporal neighbor lists whose edges carry a set of
//! attributes. A *railway layout* splits the block into sub-blocks that each
//! keep a full copy of the graph structure but only a subset of the
//! attributes, so that queries touching few attributes read fewer bytes.
//! This crate models the storage and I/O cost of such layouts and searches
//! for good ones under a storage-overhead budget:
//!
//! - [`model`]: schemas, queries, workloads, block statistics, layouts.
//! - [`cost`]: sub-block sizes, storage overhead and weighted query I/O.
//! - [`exact`]: optimal search for non-overlapping and overlapping layouts,
//!   plus ILP model construction and LP-file export.
//! - [`heuristic`]: greedy partitioners and the two baseline layouts.
//! - [`simulate`]: seeded random workload and block generation.
//! - [`experiment`]: single-instance runs, parameter sweeps and CSV output.
//! - [`format`]: text file formats for instances, specs and layout catalogs.

pub mod cost;
pub mod exact;
pub mod experiment;
pub mod fixture;
pub mod format;
pub mod heuristic;
pub mod model;
pub mod simulate;

pub use cost::{CostModel, CostReport, CoverRule};
pub use model::{
    AttrSet, Attribute, BlockStats, CostConstants, Flavor, Instance, Layout, OptimizerConfig, Query, Schema, TimeRange,
    Workload,
};
