//! Binary ILP formulations of the layout problem.
//!
//! Variables, for attribute `a`, partition `p` in `0..k` with `k = |A|`, and
//! query `q` (by id):
//!
//! - `x_a_p`: attribute `a` is stored in partition `p`;
//! - `y_p_q`: query `q` reads partition `p`;
//! - `z_a_p_q`: query `q` reads partition `p` and `p` stores `a`;
//! - `u_p`: partition `p` stores at least one attribute.
//!
//! Both models minimize Σ_q w(q)·Σ_p (structure·y_p_q + Σ_a c_e·s(a)·z_a_p_q).
//! Indicator constraints `y = 1(β > 0)` are linearized as `β − y ≥ 0` and
//! `K·y − β ≥ 0` with `K = |A| + 1`, which exceeds every gated sum.

use std::collections::HashMap;
use std::fmt;

use crate::cost::CostModel;
use crate::model::{Flavor, Instance, OptimizerConfig};

use super::part_bound;

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tolerance,
            Relation::Ge => lhs >= rhs - tolerance,
            Relation::Eq => (lhs - rhs).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// (variable index, coefficient)
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization problem over binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub flavor: Flavor,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    index: HashMap<String, usize>,
    /// Attribute count; also the number of partitions.
    attributes: usize,
    query_ids: Vec<u32>,
}

impl IlpModel {
    fn new(flavor: Flavor, attributes: usize, query_ids: Vec<u32>) -> Self {
        IlpModel {
            flavor,
            variables: Vec::new(),
            constraints: Vec::new(),
            index: HashMap::new(),
            attributes,
            query_ids,
        }
    }

    /// Adds a binary variable; names must be unique.
    pub fn add_variable(&mut self, name: impl Into<String>, objective: f64) -> usize {
        let name = name.into();
        let id = self.variables.len();
        let previous = self.index.insert(name.clone(), id);
        assert!(previous.is_none(), "duplicate variable {name}");
        self.variables.push(Variable { name, objective });
        id
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        assert!(terms.iter().all(|&(v, _)| v < self.variables.len()), "undeclared variable in constraint");
        self.constraints.push(Constraint { name: name.into(), terms, relation, rhs });
    }

    /// An empty model, for hand-built problems.
    pub fn empty(flavor: Flavor) -> Self {
        IlpModel::new(flavor, 0, Vec::new())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn attributes(&self) -> usize {
        self.attributes
    }

    pub fn partitions(&self) -> usize {
        self.attributes
    }

    pub fn query_ids(&self) -> &[u32] {
        &self.query_ids
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.variables.iter().zip(values).map(|(v, x)| v.objective * x).sum()
    }

    pub fn lhs(&self, constraint: &Constraint, values: &[f64]) -> f64 {
        constraint.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// The big-K constant of the indicator constraints.
    pub fn big_k(&self) -> f64 {
        (self.attributes + 1) as f64
    }
}

pub(crate) fn x_name(a: usize, p: usize) -> String {
    format!("x_{a}_{p}")
}

/// Declares x, y, z, u with the shared objective. Returns the index tables.
struct Families {
    x: Vec<Vec<usize>>,
    y: Vec<Vec<usize>>,
    z: Vec<Vec<Vec<usize>>>,
    u: Vec<usize>,
}

fn declare(model: &mut IlpModel, instance: &Instance) -> Families {
    let cost = CostModel::for_instance(instance);
    let k = instance.schema.len();
    let queries = instance.workload.queries();
    let block_time = instance.stats.time();
    // Queries that miss the block's time range contribute nothing.
    let weight: Vec<f64> =
        queries.iter().map(|q| if q.time().overlaps(&block_time) { q.weight() } else { 0.0 }).collect();
    let structure = cost.structure_bytes() as f64;

    let x = (0..k).map(|a| (0..k).map(|p| model.add_variable(x_name(a, p), 0.0)).collect()).collect();
    let y = (0..k)
        .map(|p| {
            queries
                .iter()
                .enumerate()
                .map(|(j, q)| model.add_variable(format!("y_{p}_{}", q.id()), weight[j] * structure))
                .collect()
        })
        .collect();
    let z = (0..k)
        .map(|a| {
            let attr_bytes = cost.attr_bytes(crate::model::AttrSet::singleton(a)) as f64;
            (0..k)
                .map(|p| {
                    queries
                        .iter()
                        .enumerate()
                        .map(|(j, q)| model.add_variable(format!("z_{a}_{p}_{}", q.id()), weight[j] * attr_bytes))
                        .collect()
                })
                .collect()
        })
        .collect();
    let u = (0..k).map(|p| model.add_variable(format!("u_{p}"), 0.0)).collect();
    Families { x, y, z, u }
}

/// `z_a_p_q − x_a_p − y_p_q ≥ −1`: reading a partition reads all of it.
fn add_read_all(model: &mut IlpModel, f: &Families, instance: &Instance) {
    let k = instance.schema.len();
    for a in 0..k {
        for p in 0..k {
            for (j, q) in instance.workload.queries().iter().enumerate() {
                model.add_constraint(
                    format!("read_all_{a}_{p}_{}", q.id()),
                    vec![(f.z[a][p][j], 1.0), (f.x[a][p], -1.0), (f.y[p][j], -1.0)],
                    Relation::Ge,
                    -1.0,
                );
            }
        }
    }
}

/// `u_p = 1(Σ_a x_a_p > 0)`.
fn add_open(model: &mut IlpModel, f: &Families, k: usize) {
    let big_k = model.big_k();
    for p in 0..k {
        let mut lo: Vec<(usize, f64)> = (0..k).map(|a| (f.x[a][p], 1.0)).collect();
        lo.push((f.u[p], -1.0));
        model.add_constraint(format!("open_lo_{p}"), lo, Relation::Ge, 0.0);
        let mut hi: Vec<(usize, f64)> = vec![(f.u[p], big_k)];
        hi.extend((0..k).map(|a| (f.x[a][p], -1.0)));
        model.add_constraint(format!("open_hi_{p}"), hi, Relation::Ge, 0.0);
    }
}

/// Non-overlapping model: every attribute in exactly one partition; a query
/// reads every partition holding one of its attributes; the number of
/// non-empty partitions respects the part bound of the budget.
pub fn build_ilp_nov(instance: &Instance, config: &OptimizerConfig) -> IlpModel {
    let k = instance.schema.len();
    let queries = instance.workload.queries();
    let mut model = IlpModel::new(Flavor::NonOverlapping, k, queries.iter().map(|q| q.id()).collect());
    let f = declare(&mut model, instance);
    let big_k = model.big_k();

    for a in 0..k {
        model.add_constraint(format!("assign_{a}"), (0..k).map(|p| (f.x[a][p], 1.0)).collect(), Relation::Eq, 1.0);
    }
    for p in 0..k {
        for (j, q) in queries.iter().enumerate() {
            let hits: Vec<(usize, f64)> = q.attrs().iter().map(|a| (f.x[a][p], 1.0)).collect();
            let mut lo = hits.clone();
            lo.push((f.y[p][j], -1.0));
            model.add_constraint(format!("use_lo_{p}_{}", q.id()), lo, Relation::Ge, 0.0);
            let mut hi = vec![(f.y[p][j], big_k)];
            hi.extend(hits.iter().map(|&(v, _)| (v, -1.0)));
            model.add_constraint(format!("use_hi_{p}_{}", q.id()), hi, Relation::Ge, 0.0);
        }
    }
    add_read_all(&mut model, &f, instance);
    add_open(&mut model, &f, k);

    let bound = part_bound(&CostModel::for_instance(instance), config.alpha);
    let rhs = if bound.is_finite() { bound } else { k as f64 };
    model.add_constraint("budget", (0..k).map(|p| (f.u[p], 1.0)).collect(), Relation::Le, rhs);
    model
}

/// Overlapping model: every attribute in at least one partition; every query
/// attribute is read from some partition that stores it; the total stored
/// bytes stay within s(B)·(1 + α).
pub fn build_ilp_ov(instance: &Instance, config: &OptimizerConfig) -> IlpModel {
    let k = instance.schema.len();
    let queries = instance.workload.queries();
    let mut model = IlpModel::new(Flavor::Overlapping, k, queries.iter().map(|q| q.id()).collect());
    let f = declare(&mut model, instance);
    let big_k = model.big_k();
    let cost = CostModel::for_instance(instance);

    for a in 0..k {
        model.add_constraint(format!("cover_{a}"), (0..k).map(|p| (f.x[a][p], 1.0)).collect(), Relation::Ge, 1.0);
    }
    for a in 0..k {
        for (j, q) in queries.iter().enumerate() {
            let needed = if q.attrs().contains(a) { 1.0 } else { 0.0 };
            model.add_constraint(
                format!("need_{a}_{}", q.id()),
                (0..k).map(|p| (f.z[a][p][j], 1.0)).collect(),
                Relation::Ge,
                needed,
            );
        }
    }
    for a in 0..k {
        for p in 0..k {
            for (j, q) in queries.iter().enumerate() {
                model.add_constraint(
                    format!("holds_{a}_{p}_{}", q.id()),
                    vec![(f.x[a][p], 1.0), (f.z[a][p][j], -1.0)],
                    Relation::Ge,
                    0.0,
                );
            }
        }
    }
    for p in 0..k {
        for (j, q) in queries.iter().enumerate() {
            let mut lo: Vec<(usize, f64)> = (0..k).map(|a| (f.z[a][p][j], 1.0)).collect();
            lo.push((f.y[p][j], -1.0));
            model.add_constraint(format!("use_lo_{p}_{}", q.id()), lo, Relation::Ge, 0.0);
            let mut hi = vec![(f.y[p][j], big_k)];
            hi.extend((0..k).map(|a| (f.z[a][p][j], -1.0)));
            model.add_constraint(format!("use_hi_{p}_{}", q.id()), hi, Relation::Ge, 0.0);
        }
    }
    add_read_all(&mut model, &f, instance);
    add_open(&mut model, &f, k);

    let structure = cost.structure_bytes() as f64;
    let mut stored = Vec::with_capacity(k * (k + 1));
    for p in 0..k {
        stored.push((f.u[p], structure));
        for a in 0..k {
            stored.push((f.x[a][p], cost.attr_bytes(crate::model::AttrSet::singleton(a)) as f64));
        }
    }
    model.add_constraint("budget", stored, Relation::Le, cost.block_size() as f64 * (1.0 + config.alpha));
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    fn alpha(a: f64) -> OptimizerConfig {
        OptimizerConfig::new(a).unwrap()
    }

    #[test]
    fn fixture_shapes() {
        let inst = fixture::instance();
        let nov = build_ilp_nov(&inst, &alpha(1.0));
        assert_eq!(nov.constraints().len(), 40);
        assert_eq!(nov.variables().len(), 3 * 4 * 3);
        let ov = build_ilp_ov(&inst, &alpha(1.0));
        assert_eq!(ov.constraints().len(), 64);
        assert_eq!(ov.variables().len(), 36);
    }

    #[test]
    fn fixture_coefficients() {
        let inst = fixture::instance();
        let nov = build_ilp_nov(&inst, &alpha(1.0));
        for p in 0..3 {
            let y = nov.variable(&format!("y_{p}_1")).unwrap();
            assert_eq!(nov.variables()[y].objective, 368.0);
            let z = nov.variable(&format!("z_1_{p}_2")).unwrap();
            assert_eq!(nov.variables()[z].objective, 80.0);
        }
        let budget = nov.constraints().last().unwrap();
        assert!((budget.rhs - (1.0 + 344.0 / 184.0)).abs() < 1e-12);

        let ov = build_ilp_ov(&inst, &alpha(1.0));
        let budget = ov.constraints().last().unwrap();
        assert_eq!(budget.relation, Relation::Le);
        assert_eq!(budget.rhs, 688.0);
        let u0 = ov.variable("u_0").unwrap();
        assert!(budget.terms.contains(&(u0, 184.0)));
    }

    #[test]
    fn read_all_structure() {
        let inst = fixture::instance();
        for model in [build_ilp_nov(&inst, &alpha(1.0)), build_ilp_ov(&inst, &alpha(1.0))] {
            let read_all: Vec<_> = model.constraints().iter().filter(|c| c.name.starts_with("read_all_")).collect();
            assert_eq!(read_all.len(), 3 * 3 * 2);
            for c in read_all {
                assert_eq!(c.rhs, -1.0);
                assert_eq!(c.relation, Relation::Ge);
                let z = &model.variables()[c.terms[0].0];
                assert!(z.name.starts_with("z_"));
                assert_eq!(c.terms[0].1, 1.0);
            }
        }
    }

    #[test]
    fn time_disjoint_queries_have_zero_cost() {
        let inst = fixture::instance_with_q2_time(200, 300);
        let nov = build_ilp_nov(&inst, &alpha(1.0));
        let y = nov.variable("y_0_2").unwrap();
        assert_eq!(nov.variables()[y].objective, 0.0);
    }
}
