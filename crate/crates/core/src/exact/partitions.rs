use super::{Budget, ExactError, ExactSolution};
use crate::cost::CostModel;
use crate::heuristic::{improves, single_partition};
use crate::model::{AttrSet, Flavor, Instance, Layout, OptimizerConfig, EPSILON};

/// Upper bound on the number of parts of a non-overlapping layout within
/// budget: 1 + α / (1 − c_e·Σs(a) / s(B)). Infinite if the structure
/// fraction is not positive.
pub fn part_bound(model: &CostModel<'_>, alpha: f64) -> f64 {
    let per_part = model.structure_fraction();
    if per_part <= 0.0 {
        f64::INFINITY
    } else {
        1.0 + alpha / per_part
    }
}

/// Minimum query I/O over all set partitions of the attributes whose part
/// count fits the budget.
///
/// Partitions are enumerated as restricted growth strings, attribute 0
/// first, and a branch is cut when the I/O of the attributes placed so far
/// plus the attribute bytes every query must still read cannot beat the
/// incumbent.
pub fn solve_exact_nov(instance: &Instance, config: &OptimizerConfig) -> Result<ExactSolution, ExactError> {
    let n = instance.schema.len();
    if n > config.enumeration_limit {
        return Err(ExactError::TooManyAttributes { attributes: n, limit: config.enumeration_limit });
    }
    let model = CostModel::for_instance(instance);
    let bound = part_bound(&model, config.alpha);
    let max_parts = if bound.is_finite() { ((bound + EPSILON).floor() as usize).clamp(1, n) } else { n };

    let block_time = instance.stats.time();
    let queries: Vec<(AttrSet, f64)> = instance
        .workload
        .queries()
        .iter()
        .filter(|q| q.time().overlaps(&block_time))
        .map(|q| (q.attrs(), q.weight()))
        .collect();

    let mut search = PartitionSearch {
        model: &model,
        queries,
        n,
        max_parts,
        parts: Vec::with_capacity(max_parts),
        best: None,
        budget: Budget::new(config.node_limit, config.time_limit),
    };
    search.descend(0);

    let optimal = !search.budget.exhausted;
    let nodes_explored = search.budget.nodes;
    let layout = match search.best {
        Some((_, parts)) => Layout::from_parts(parts, Flavor::NonOverlapping),
        None => single_partition(&instance.schema),
    };
    let report = model.query_io(&layout, &instance.workload);
    Ok(ExactSolution {
        objective: report.query_io,
        query_io: report.query_io,
        overhead: report.overhead,
        layout,
        optimal,
        nodes_explored,
    })
}

struct PartitionSearch<'a, 'm> {
    model: &'a CostModel<'m>,
    /// Queries that reach the block, as (attributes, weight).
    queries: Vec<(AttrSet, f64)>,
    n: usize,
    max_parts: usize,
    parts: Vec<AttrSet>,
    best: Option<(f64, Vec<AttrSet>)>,
    budget: Budget,
}

impl PartitionSearch<'_, '_> {
    /// I/O of the attributes placed so far, plus the attribute bytes each
    /// query still has to read for attributes `next..n`.
    fn lower_bound(&self, next: usize) -> f64 {
        let pending = AttrSet::full(self.n).difference(AttrSet::full(next));
        self.queries
            .iter()
            .map(|&(attrs, weight)| {
                let placed: u64 =
                    self.parts.iter().filter(|p| p.intersects(attrs)).map(|&p| self.model.sub_block_size(p)).sum();
                weight * (placed + self.model.attr_bytes(attrs.intersection(pending))) as f64
            })
            .sum()
    }

    fn descend(&mut self, next: usize) {
        if !self.budget.tick() {
            return;
        }
        let bound = self.lower_bound(next);
        if let Some((best, _)) = &self.best {
            if !improves(bound, *best) {
                return;
            }
        }
        if next == self.n {
            self.best = Some((bound, self.parts.clone()));
            return;
        }
        for p in 0..self.parts.len() {
            self.parts[p] = self.parts[p].with(next);
            self.descend(next + 1);
            self.parts[p] = self.parts[p].without(next);
        }
        if self.parts.len() < self.max_parts {
            self.parts.push(AttrSet::singleton(next));
            self.descend(next + 1);
            self.parts.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::model::Schema;
    use approx::assert_abs_diff_eq;

    fn set(schema: &Schema, names: &[&str]) -> AttrSet {
        schema.set_of(names.iter().copied()).unwrap()
    }

    #[test]
    fn fixture_optimum() {
        let inst = fixture::instance();
        let sol = solve_exact_nov(&inst, &OptimizerConfig::new(1.0).unwrap()).unwrap();
        assert_eq!(sol.layout.sub_blocks(), &[set(&inst.schema, &["a1", "a2"]), set(&inst.schema, &["a3"])]);
        assert_eq!(sol.objective, 832.0);
        assert!(sol.optimal);

        let zero = solve_exact_nov(&inst, &OptimizerConfig::new(0.0).unwrap()).unwrap();
        assert_eq!(zero.layout.sub_blocks(), &[inst.schema.full_set()]);
        assert_eq!(zero.objective, 1032.0);
        assert_eq!(zero.overhead, 0.0);
    }

    #[test]
    fn fixture_part_bound() {
        let inst = fixture::instance();
        let model = CostModel::for_instance(&inst);
        assert_abs_diff_eq!(part_bound(&model, 1.0), 1.0 + 344.0 / 184.0, epsilon = 1e-12);
        assert_abs_diff_eq!(part_bound(&model, 1.0), 2.869565, epsilon = 1e-6);
        // With room for three parts the per-attribute split is reachable but not better.
        let wide = solve_exact_nov(&inst, &OptimizerConfig::new(2.0).unwrap()).unwrap();
        assert_eq!(wide.objective, 832.0);
    }

    #[test]
    fn rejects_large_schemas() {
        let schema = Schema::from_sizes(&[1; 13]).unwrap();
        let inst = Instance { schema, ..fixture::instance() };
        let err = solve_exact_nov(&inst, &OptimizerConfig::new(1.0).unwrap()).unwrap_err();
        assert_eq!(err, ExactError::TooManyAttributes { attributes: 13, limit: 12 });
    }

    #[test]
    fn node_budget_flags_truncation() {
        let inst = fixture::instance();
        let config = OptimizerConfig::new(1.0).unwrap().with_node_limit(2);
        let sol = solve_exact_nov(&inst, &config).unwrap();
        assert!(!sol.optimal);
        assert!(sol.overhead <= 1.0 + EPSILON);
    }
}
