//! Optimal layouts.
//!
//! Both solvers search the attribute-to-partition assignment directly. Once
//! the assignment is fixed, the remaining ILP variables (which partitions a
//! query reads, which partitions are non-empty) follow from it, so the search
//! over assignments is complete. The ILP models themselves can be built and
//! exported in LP format for cross-checking with an external MILP solver.

mod ilp;
mod lp;
mod overlapping;
mod partitions;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use ilp::{build_ilp_nov, build_ilp_ov, Constraint, IlpModel, Relation, Variable};
pub use lp::{export_lp, import_assignment, parse_solution, IlpError};
pub use overlapping::{optimal_cover_cost, solve_exact_ov};
pub use partitions::{part_bound, solve_exact_nov};

use crate::model::Layout;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{attributes} attributes exceed the exact solver limit of {limit}")]
    TooManyAttributes { attributes: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub layout: Layout,
    /// Objective the solver minimized: query I/O with intersecting covers
    /// for non-overlapping layouts, with minimum-cost covers for overlapping
    /// ones.
    pub objective: f64,
    /// Query I/O of `layout` under the cost model's own mapping for its
    /// flavor (greedy covers for overlapping layouts).
    pub query_io: f64,
    pub overhead: f64,
    /// False when the search stopped on its node or time budget.
    pub optimal: bool,
    pub nodes_explored: u64,
}

/// Node and wall-clock accounting for a search.
struct Budget {
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl Budget {
    fn new(node_limit: Option<u64>, time_limit: Option<Duration>) -> Self {
        Budget { nodes: 0, node_limit, deadline: time_limit.map(|t| Instant::now() + t), exhausted: false }
    }

    /// Counts one node; returns false once the budget is spent.
    fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        let over_nodes = self.node_limit.is_some_and(|limit| self.nodes > limit);
        let over_time = self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d);
        self.exhausted = over_nodes || over_time;
        !self.exhausted
    }
}
