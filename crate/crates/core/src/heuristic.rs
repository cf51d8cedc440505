//! Greedy partitioners and the two baseline layouts.

use crate::cost::{CostModel, CoverRule};
use crate::model::{within_budget, AttrSet, Flavor, Instance, Layout, OptimizerConfig, Schema};

/// True when `candidate` is lower than `incumbent` by more than rounding noise.
pub(crate) fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - crate::model::EPSILON * incumbent.abs().max(1.0)
}

/// Every attribute in one sub-block; the conventional unpartitioned layout.
pub fn single_partition(schema: &Schema) -> Layout {
    Layout::from_parts(vec![schema.full_set()], Flavor::NonOverlapping)
}

/// One sub-block per attribute.
pub fn partition_per_attribute(schema: &Schema) -> Layout {
    Layout::from_parts((0..schema.len()).map(AttrSet::singleton).collect(), Flavor::NonOverlapping)
}

/// Greedy non-overlapping partitioning.
///
/// For every part count k the attributes are placed one at a time, most
/// frequently accessed first, into the part that minimizes the query I/O of
/// the attributes placed so far. The cheapest budget-respecting assignment
/// over all k wins. Since the non-overlapping overhead only grows with the
/// number of parts, the scan over k stops at the first infeasible k.
pub fn greedy_nov(instance: &Instance, config: &OptimizerConfig) -> Layout {
    let model = CostModel::for_instance(instance);
    let workload = &instance.workload;
    let n = instance.schema.len();

    let freq: Vec<f64> = (0..n).map(|a| workload.frequency(a)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| freq[b].total_cmp(&freq[a]).then(a.cmp(&b)));

    let mut best: Option<(f64, Vec<AttrSet>)> = None;
    for k in 1..=n {
        let mut parts = vec![AttrSet::EMPTY; k];
        for &attr in &order {
            let mut target = 0;
            let mut lowest = f64::INFINITY;
            for i in 0..k {
                parts[i] = parts[i].with(attr);
                // Empty parts intersect no query, so they read nothing.
                let io = model.io_of(&parts, workload, CoverRule::Intersecting);
                if lowest.is_infinite() || improves(io, lowest) {
                    lowest = io;
                    target = i;
                }
                parts[i] = parts[i].without(attr);
            }
            parts[target] = parts[target].with(attr);
        }
        parts.retain(|p| !p.is_empty());
        if !within_budget(model.overhead_for_parts(parts.len()), config.alpha) {
            break;
        }
        let io = model.io_of(&parts, workload, CoverRule::Intersecting);
        if best.as_ref().is_none_or(|(c, _)| improves(io, *c)) {
            best = Some((io, parts));
        }
    }
    let (_, parts) = best.expect("a single part is always within budget");
    Layout::from_parts(parts, Flavor::NonOverlapping)
}

/// One merge performed by [`greedy_ov_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub first: AttrSet,
    pub second: AttrSet,
    /// Query I/O increase per unit of storage overhead saved.
    pub cost: f64,
}

/// Greedy overlapping partitioning; see [`greedy_ov_traced`].
pub fn greedy_ov(instance: &Instance, config: &OptimizerConfig) -> Layout {
    greedy_ov_traced(instance, config).0
}

/// Starts from one sub-block per distinct query attribute set (plus one for
/// attributes no query reads) and merges the pair of sub-blocks with the
/// lowest I/O increase per unit of overhead saved until the layout fits the
/// budget. Also returns the merges in the order they were applied.
pub fn greedy_ov_traced(instance: &Instance, config: &OptimizerConfig) -> (Layout, Vec<Merge>) {
    let model = CostModel::for_instance(instance);
    let workload = &instance.workload;

    let mut blocks: Vec<AttrSet> = Vec::new();
    for q in workload.queries() {
        if !blocks.contains(&q.attrs()) {
            blocks.push(q.attrs());
        }
    }
    let unread = instance.schema.full_set().difference(workload.accessed());
    if !unread.is_empty() {
        blocks.push(unread);
    }

    let mut merges = Vec::new();
    loop {
        let overhead = model.overhead_of(&blocks);
        if within_budget(overhead, config.alpha) {
            break;
        }
        let io = model.io_of(&blocks, workload, CoverRule::Greedy);
        let mut best: Option<(f64, usize, usize, Vec<AttrSet>)> = None;
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                let merged = merge(&blocks, i, j);
                let saved = overhead - model.overhead_of(&merged);
                debug_assert!(saved > 0.0, "a merge always drops one structure copy");
                let cost = (model.io_of(&merged, workload, CoverRule::Greedy) - io) / saved;
                if best.as_ref().is_none_or(|(c, ..)| improves(cost, *c)) {
                    best = Some((cost, i, j, merged));
                }
            }
        }
        let (cost, i, j, merged) = best.expect("an over-budget layout has at least two sub-blocks");
        merges.push(Merge { first: blocks[i], second: blocks[j], cost });
        blocks = merged;
    }
    (Layout::from_parts(blocks, Flavor::Overlapping), merges)
}

/// Replaces `blocks[i]` by `blocks[i] ∪ blocks[j]` and drops `blocks[j]`,
/// collapsing the union into an existing identical sub-block if there is one.
fn merge(blocks: &[AttrSet], i: usize, j: usize) -> Vec<AttrSet> {
    let union = blocks[i].union(blocks[j]);
    let mut out = Vec::with_capacity(blocks.len() - 1);
    for (k, &b) in blocks.iter().enumerate() {
        let b = if k == i { union } else { b };
        if k != j && !out.contains(&b) {
            out.push(b);
        }
    }
    out
}
