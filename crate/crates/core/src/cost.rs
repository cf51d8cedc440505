//! Analytical cost model: sub-block sizes, storage overhead, the mapping
//! from a query to the sub-blocks it reads, and total weighted query I/O.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{AttrSet, BlockStats, CostConstants, Flavor, Instance, Layout, Query, Schema, Workload};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostError {
    #[error("the non-overlapping overhead formula needs a non-overlapping layout")]
    NotNonOverlapping,
}

/// How a query is mapped onto the sub-blocks it reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverRule {
    /// Every sub-block sharing an attribute with the query.
    Intersecting,
    /// Greedy selection by relative marginal gain.
    Greedy,
}

impl From<Flavor> for CoverRule {
    fn from(flavor: Flavor) -> Self {
        match flavor {
            Flavor::NonOverlapping => CoverRule::Intersecting,
            Flavor::Overlapping => CoverRule::Greedy,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    /// Weighted query I/O in bytes (L).
    pub query_io: f64,
    /// Storage overhead relative to the unpartitioned block (H).
    pub overhead: f64,
    pub per_query_io: BTreeMap<u32, f64>,
}

/// Size and I/O calculator for one block.
#[derive(Debug, Clone)]
pub struct CostModel<'a> {
    schema: &'a Schema,
    stats: BlockStats,
    /// c_e · s(a), indexed by attribute id.
    edge_attr_bytes: Vec<u64>,
    structure: u64,
    block_size: u64,
}

impl<'a> CostModel<'a> {
    pub fn new(schema: &'a Schema, stats: BlockStats, consts: CostConstants) -> Self {
        let edge_attr_bytes: Vec<u64> = schema.attributes().iter().map(|a| stats.edges() * a.size).collect();
        let structure = stats.edges() * consts.per_edge_structure + stats.neighbor_lists() * consts.per_neighbor_list;
        let block_size = structure + edge_attr_bytes.iter().sum::<u64>();
        CostModel { schema, stats, edge_attr_bytes, structure, block_size }
    }

    pub fn for_instance(instance: &'a Instance) -> Self {
        CostModel::new(&instance.schema, instance.stats, instance.consts)
    }

    pub fn schema(&self) -> &'a Schema {
        self.schema
    }

    pub fn stats(&self) -> BlockStats {
        self.stats
    }

    /// Bytes of graph structure replicated in every sub-block.
    pub fn structure_bytes(&self) -> u64 {
        self.structure
    }

    /// c_e · Σ s(a) over `attrs`.
    pub fn attr_bytes(&self, attrs: AttrSet) -> u64 {
        attrs.iter().map(|id| self.edge_attr_bytes[id]).sum()
    }

    /// Size of a sub-block holding `attrs` next to a full structure copy.
    pub fn sub_block_size(&self, attrs: AttrSet) -> u64 {
        self.structure + self.attr_bytes(attrs)
    }

    /// s(B): size of the unpartitioned block.
    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    /// Fraction of the block taken by graph structure; the per-extra-part
    /// overhead of a non-overlapping layout.
    pub fn structure_fraction(&self) -> f64 {
        self.structure as f64 / self.block_size as f64
    }

    /// Overhead of a non-overlapping layout, from its part count alone.
    pub fn storage_overhead_nov(&self, layout: &Layout) -> Result<f64, CostError> {
        if layout.flavor() != Flavor::NonOverlapping {
            return Err(CostError::NotNonOverlapping);
        }
        Ok(self.overhead_for_parts(layout.len()))
    }

    /// (k − 1) · (1 − c_e·Σs(a) / s(B)).
    pub fn overhead_for_parts(&self, parts: usize) -> f64 {
        let attr_total = self.block_size - self.structure;
        (parts as f64 - 1.0) * (1.0 - attr_total as f64 / self.block_size as f64)
    }

    /// Overhead of any layout: Σ s(B′) / s(B) − 1.
    pub fn storage_overhead(&self, layout: &Layout) -> f64 {
        self.overhead_of(layout.sub_blocks())
    }

    pub fn overhead_of(&self, blocks: &[AttrSet]) -> f64 {
        self.total_size(blocks) as f64 / self.block_size as f64 - 1.0
    }

    pub fn total_size(&self, blocks: &[AttrSet]) -> u64 {
        blocks.iter().map(|&b| self.sub_block_size(b)).sum()
    }

    /// Greedy cover of `query` by relative marginal gain. Returns indices
    /// into `blocks` in selection order.
    ///
    /// Only sub-blocks holding at least one still-uncovered query attribute
    /// are candidates; ties go to the lowest index. If `blocks` cannot cover
    /// the query the selection stops once no candidate is left.
    pub fn greedy_cover(&self, blocks: &[AttrSet], query: AttrSet) -> Vec<usize> {
        let mut covered = AttrSet::EMPTY;
        let mut selected = Vec::new();
        while !query.is_subset_of(covered) {
            let uncovered = query.difference(covered);
            // gain ∝ new / size; compare new_i·size_j against new_j·size_i exactly.
            let mut best: Option<(usize, u128, u128)> = None;
            for (i, &b) in blocks.iter().enumerate() {
                if selected.contains(&i) {
                    continue;
                }
                let new = self.attr_bytes(b.intersection(uncovered)) as u128;
                if new == 0 {
                    continue;
                }
                let size = self.sub_block_size(b) as u128;
                match best {
                    Some((_, bn, bs)) if new * bs <= bn * size => {}
                    _ => best = Some((i, new, size)),
                }
            }
            let Some((i, _, _)) = best else { break };
            covered = covered.union(blocks[i]);
            selected.push(i);
        }
        selected
    }

    /// Sub-blocks read by `query` under the overlapping mapping.
    pub fn covering_sub_blocks_ov(&self, layout: &Layout, query: &Query) -> Vec<usize> {
        self.greedy_cover(layout.sub_blocks(), query.attrs())
    }

    /// Unweighted bytes read by a query with attributes `query`.
    pub fn cover_bytes(&self, blocks: &[AttrSet], query: AttrSet, rule: CoverRule) -> u64 {
        match rule {
            CoverRule::Intersecting => {
                blocks.iter().filter(|b| b.intersects(query)).map(|&b| self.sub_block_size(b)).sum()
            }
            CoverRule::Greedy => {
                self.greedy_cover(blocks, query).into_iter().map(|i| self.sub_block_size(blocks[i])).sum()
            }
        }
    }

    fn reaches_block(&self, query: &Query) -> bool {
        query.time().overlaps(&self.stats.time())
    }

    /// Weighted I/O of one query; zero when its time range misses the block.
    pub fn query_cost(&self, blocks: &[AttrSet], query: &Query, rule: CoverRule) -> f64 {
        if !self.reaches_block(query) {
            return 0.0;
        }
        query.weight() * self.cover_bytes(blocks, query.attrs(), rule) as f64
    }

    /// Total weighted I/O L over `blocks` under `rule`.
    pub fn io_of(&self, blocks: &[AttrSet], workload: &Workload, rule: CoverRule) -> f64 {
        workload.queries().iter().map(|q| self.query_cost(blocks, q, rule)).sum()
    }

    /// Full cost report, mapping queries by the layout's flavor.
    pub fn query_io(&self, layout: &Layout, workload: &Workload) -> CostReport {
        let rule = CoverRule::from(layout.flavor());
        let per_query_io: BTreeMap<u32, f64> =
            workload.queries().iter().map(|q| (q.id(), self.query_cost(layout.sub_blocks(), q, rule))).collect();
        CostReport { query_io: per_query_io.values().sum(), overhead: self.storage_overhead(layout), per_query_io }
    }
}

/// Sub-blocks sharing at least one attribute with the query.
pub fn covering_sub_blocks_nov(layout: &Layout, query: &Query) -> Vec<usize> {
    layout.sub_blocks().iter().enumerate().filter(|(_, b)| b.intersects(query.attrs())).map(|(i, _)| i).collect()
}
