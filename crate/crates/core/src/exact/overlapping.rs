use super::{Budget, ExactError, ExactSolution};
use crate::cost::CostModel;
use crate::heuristic::{greedy_nov, greedy_ov, improves, single_partition};
use crate::model::{AttrSet, Flavor, Instance, Layout, OptimizerConfig, Query, EPSILON};

/// Size tables are indexed by column mask, so the overlapping search is
/// limited to this many attributes.
const COLUMN_TABLE_LIMIT: usize = 20;

/// Cheapest set of sub-blocks whose union covers `query`, found by trying
/// every subset of the layout. Returns the total size and the chosen
/// sub-block indices, or `None` if the layout cannot cover the query.
pub fn optimal_cover_cost(model: &CostModel<'_>, layout: &Layout, query: &Query) -> Option<(u64, Vec<usize>)> {
    exhaustive_cover(model, layout.sub_blocks(), query.attrs())
}

fn exhaustive_cover(model: &CostModel<'_>, blocks: &[AttrSet], query: AttrSet) -> Option<(u64, Vec<usize>)> {
    assert!(blocks.len() < 32, "exhaustive cover over {} sub-blocks", blocks.len());
    let sizes: Vec<u64> = blocks.iter().map(|&b| model.sub_block_size(b)).collect();
    let mut best: Option<(u64, u32)> = None;
    for chosen in 1u32..(1 << blocks.len()) {
        let members = || (0..blocks.len()).filter(move |i| chosen & (1 << i) != 0);
        let union = members().fold(AttrSet::EMPTY, |acc, i| acc.union(blocks[i]));
        if !query.is_subset_of(union) {
            continue;
        }
        let cost: u64 = members().map(|i| sizes[i]).sum();
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, chosen));
        }
    }
    best.map(|(cost, chosen)| (cost, (0..blocks.len()).filter(|i| chosen & (1 << i) != 0).collect()))
}

/// Weighted I/O of `blocks` when every query reads its cheapest cover.
fn optimal_cover_io(model: &CostModel<'_>, blocks: &[AttrSet], instance: &Instance) -> Option<f64> {
    let time = instance.stats.time();
    let mut total = 0.0;
    for q in instance.workload.queries().iter().filter(|q| q.time().overlaps(&time)) {
        total += q.weight() * exhaustive_cover(model, blocks, q.attrs())?.0 as f64;
    }
    Some(total)
}

/// Minimum-I/O overlapping layout within budget, pricing every query at
/// its cheapest cover.
///
/// Branch and bound over the columns of the attribute-to-partition matrix.
/// Columns are attribute masks with attribute 0 as the most significant bit
/// and are added in strictly decreasing order, which removes the
/// interchangeability of partitions and forces attribute 0 into the first
/// column. A branch is cut when its storage cannot fit the budget, when the
/// remaining columns cannot cover the attributes still unhoused, or when a
/// lower bound on the query I/O cannot beat the incumbent. The incumbent
/// starts at the best of the greedy layouts.
pub fn solve_exact_ov(instance: &Instance, config: &OptimizerConfig) -> Result<ExactSolution, ExactError> {
    let n = instance.schema.len();
    if n > COLUMN_TABLE_LIMIT {
        return Err(ExactError::TooManyAttributes { attributes: n, limit: COLUMN_TABLE_LIMIT });
    }
    let model = CostModel::for_instance(instance);
    let mut search = ColumnSearch::new(&model, instance, config);

    for seed in [single_partition(&instance.schema), greedy_nov(instance, config), greedy_ov(instance, config)] {
        let blocks = seed.sub_blocks();
        let fits = model.total_size(blocks) as f64 <= search.capacity;
        if let (true, Some(io)) = (fits, optimal_cover_io(&model, blocks, instance)) {
            if search.best.as_ref().is_none_or(|(c, _)| improves(io, *c)) {
                search.best = Some((io, blocks.to_vec()));
            }
        }
    }

    let root = QueryCovers::new(&search.queries);
    search.expand(1u64 << n, 0, 0, 0, &root);

    let optimal = !search.budget.exhausted;
    let nodes_explored = search.budget.nodes;
    let (objective, blocks) = search.best.expect("the single partition always fits");
    let layout = Layout::from_parts(blocks, Flavor::Overlapping);
    let report = model.query_io(&layout, &instance.workload);
    Ok(ExactSolution {
        layout,
        objective,
        query_io: report.query_io,
        overhead: report.overhead,
        optimal,
        nodes_explored,
    })
}

/// A query reaching the block, with its attributes renumbered 0..m so that
/// cover states fit in a small table.
struct QueryInfo {
    weight: f64,
    attrs: AttrSet,
    /// `rest_bytes[s]`: attribute bytes of the query attributes in local mask `s`.
    rest_bytes: Vec<u64>,
    /// `rest_column[s]`: local mask `s` as a column mask.
    rest_column: Vec<u64>,
}

/// For every query, the cheapest committed columns covering each subset of
/// its attributes (`u64::MAX` when unreachable).
#[derive(Clone)]
struct QueryCovers(Vec<Vec<u64>>);

impl QueryCovers {
    fn new(queries: &[QueryInfo]) -> Self {
        QueryCovers(
            queries
                .iter()
                .map(|q| {
                    let mut dp = vec![u64::MAX; q.rest_bytes.len()];
                    dp[0] = 0;
                    dp
                })
                .collect(),
        )
    }
}

struct ColumnSearch<'a, 'm> {
    model: &'a CostModel<'m>,
    n: usize,
    queries: Vec<QueryInfo>,
    /// Sub-block size for every column mask.
    sizes: Vec<u64>,
    capacity: f64,
    columns: Vec<u64>,
    best: Option<(f64, Vec<AttrSet>)>,
    budget: Budget,
}

impl<'a, 'm> ColumnSearch<'a, 'm> {
    fn new(model: &'a CostModel<'m>, instance: &Instance, config: &OptimizerConfig) -> Self {
        let n = instance.schema.len();
        let mut sizes = vec![model.structure_bytes(); 1 << n];
        for mask in 1..sizes.len() {
            let low = mask.trailing_zeros() as usize;
            sizes[mask] = sizes[mask & (mask - 1)] + model.attr_bytes(AttrSet::singleton(n - 1 - low));
        }
        let time = instance.stats.time();
        let queries = instance
            .workload
            .queries()
            .iter()
            .filter(|q| q.time().overlaps(&time))
            .map(|q| {
                let ids: Vec<usize> = q.attrs().iter().collect();
                let states = 1usize << ids.len();
                let local = |s: usize| ids.iter().enumerate().filter(move |(i, _)| s & (1 << i) != 0).map(|(_, &a)| a);
                QueryInfo {
                    weight: q.weight(),
                    attrs: q.attrs(),
                    rest_bytes: (0..states).map(|s| model.attr_bytes(local(s).collect())).collect(),
                    rest_column: (0..states).map(|s| local(s).fold(0, |m, a| m | 1 << (n - 1 - a))).collect(),
                }
            })
            .collect();
        let capacity = model.block_size() as f64 * (1.0 + config.alpha + EPSILON);
        ColumnSearch {
            model,
            n,
            queries,
            sizes,
            capacity,
            columns: Vec::with_capacity(n),
            best: None,
            budget: Budget::new(config.node_limit, config.time_limit),
        }
    }

    fn decode(&self, column: u64) -> AttrSet {
        (0..self.n).filter(|a| column & (1 << (self.n - 1 - a)) != 0).collect()
    }

    #[cfg(test)]
    fn encode(&self, attrs: AttrSet) -> u64 {
        attrs.iter().fold(0, |m, a| m | 1 << (self.n - 1 - a))
    }

    /// Tries every column below `last` as the next one.
    fn expand(&mut self, last: u64, used: u64, covered: u64, depth: usize, covers: &QueryCovers) {
        let full = (1u64 << self.n) - 1;
        for column in (1..last).rev() {
            if self.budget.exhausted {
                return;
            }
            let stored = used + self.sizes[column as usize];
            if stored as f64 > self.capacity {
                continue;
            }
            let unhoused = full & !(covered | column);
            if unhoused != 0 {
                let top = 1u64 << (63 - unhoused.leading_zeros());
                let rest = self.sizes[unhoused as usize];
                if depth + 1 >= self.n || top >= column || (stored + rest) as f64 > self.capacity {
                    continue;
                }
            }
            self.visit(column, stored, covered | column, depth + 1, covers);
        }
    }

    fn visit(&mut self, column: u64, used: u64, covered: u64, depth: usize, parent: &QueryCovers) {
        if !self.budget.tick() {
            return;
        }
        let attrs = self.decode(column);
        let size = self.sizes[column as usize];
        let mut covers = parent.clone();
        for (q, dp) in self.queries.iter().zip(covers.0.iter_mut()) {
            let hit = local_mask(q, attrs);
            if hit == 0 {
                continue;
            }
            for state in 0..dp.len() {
                if dp[state] != u64::MAX {
                    let next = state | hit;
                    dp[next] = dp[next].min(dp[state] + size);
                }
            }
        }
        self.columns.push(column);

        let full = (1u64 << self.n) - 1;
        if covered == full {
            let io: f64 = self
                .queries
                .iter()
                .zip(&covers.0)
                .map(|(q, dp)| q.weight * *dp.last().expect("non-empty table") as f64)
                .sum();
            if self.best.as_ref().is_none_or(|(c, _)| improves(io, *c)) {
                let blocks = self.columns.iter().map(|&c| self.decode(c)).collect();
                self.best = Some((io, blocks));
            }
        }

        if depth < self.n {
            let bound = self.lower_bound(column, used, depth, &covers);
            if self.best.as_ref().is_none_or(|(c, _)| improves(bound, *c)) {
                self.expand(column, used, covered, depth, &covers);
            }
        }
        self.columns.pop();
    }

    /// Lower bound on the final I/O below a node whose last column is
    /// `last`. A query either reads committed columns only, or reads some
    /// committed columns covering a subset S of its attributes plus future
    /// columns covering the rest; the latter cost at least one structure copy
    /// plus the rest's bytes, and one more structure copy if no single future
    /// column (all of which sort below `last`) can hold the whole rest.
    fn lower_bound(&self, last: u64, used: u64, depth: usize, covers: &QueryCovers) -> f64 {
        let structure = self.model.structure_bytes();
        let spare = self.capacity - used as f64;
        let columns_left = self.n - depth;
        let mut total = 0.0;
        for (q, dp) in self.queries.iter().zip(&covers.0) {
            let full = dp.len() - 1;
            let mut best = dp[full];
            for (state, &reached) in dp.iter().enumerate().take(full) {
                if reached == u64::MAX {
                    continue;
                }
                let rest = full & !state;
                let one_column = q.rest_column[rest] < last;
                let copies: usize = if one_column { 1 } else { 2 };
                if columns_left < copies {
                    continue;
                }
                let future = copies as u64 * structure + q.rest_bytes[rest];
                if (structure + q.rest_bytes[rest]) as f64 > spare {
                    continue;
                }
                best = best.min(reached + future);
            }
            if best == u64::MAX {
                return f64::INFINITY;
            }
            total += q.weight * best as f64;
        }
        total
    }
}

/// Local cover-state bits of the query attributes inside `attrs`.
fn local_mask(q: &QueryInfo, attrs: AttrSet) -> usize {
    q.attrs.iter().enumerate().filter(|&(_, a)| attrs.contains(a)).fold(0, |m, (i, _)| m | 1 << i)
}
