//! Brute-force reference solvers. They recompute sizes and costs from the
//! raw instance data and share no code with the library's cost model or
//! search routines.

#![allow(dead_code)]

use railway_core::{AttrSet, BlockStats, CostConstants, Instance, Query, Schema, TimeRange, Workload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Raw {
    pub sizes: Vec<u64>,
    pub edges: u64,
    pub lists: u64,
    pub per_edge: u64,
    pub per_list: u64,
    /// (attribute ids, weight, reaches block)
    pub queries: Vec<(Vec<usize>, f64, bool)>,
}

impl Raw {
    pub fn of(inst: &Instance) -> Raw {
        let block = inst.stats.time();
        Raw {
            sizes: inst.schema.attributes().iter().map(|a| a.size).collect(),
            edges: inst.stats.edges(),
            lists: inst.stats.neighbor_lists(),
            per_edge: inst.consts.per_edge_structure,
            per_list: inst.consts.per_neighbor_list,
            queries: inst
                .workload
                .queries()
                .iter()
                .map(|q| {
                    let t = q.time();
                    let hits = t.start() <= block.end() && block.start() <= t.end();
                    (q.attrs().iter().collect(), q.weight(), hits)
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    /// Bytes of a sub-block holding `attrs` (a list of ids).
    pub fn size(&self, attrs: &[usize]) -> u64 {
        let attr_sum: u64 = attrs.iter().map(|&a| self.sizes[a]).sum();
        self.edges * (self.per_edge + attr_sum) + self.lists * self.per_list
    }

    pub fn block_size(&self) -> u64 {
        self.size(&(0..self.n()).collect::<Vec<_>>())
    }

    pub fn overhead(&self, parts: &[Vec<usize>]) -> f64 {
        let total: u64 = parts.iter().map(|p| self.size(p)).sum();
        total as f64 / self.block_size() as f64 - 1.0
    }

    /// Query I/O when each query reads every part it shares an attribute with.
    pub fn intersecting_io(&self, parts: &[Vec<usize>]) -> f64 {
        self.queries
            .iter()
            .filter(|(_, _, hits)| *hits)
            .map(|(attrs, w, _)| {
                let read: u64 =
                    parts.iter().filter(|p| p.iter().any(|a| attrs.contains(a))).map(|p| self.size(p)).sum();
                w * read as f64
            })
            .sum()
    }

    /// Cheapest cover of `attrs` by `parts`, trying every subset of parts.
    pub fn cheapest_cover(&self, parts: &[Vec<usize>], attrs: &[usize]) -> Option<u64> {
        let mut best: Option<u64> = None;
        for chosen in 1u64..(1 << parts.len()) {
            let picked: Vec<&Vec<usize>> =
                parts.iter().enumerate().filter(|(i, _)| chosen >> i & 1 == 1).map(|(_, p)| p).collect();
            if attrs.iter().all(|a| picked.iter().any(|p| p.contains(a))) {
                let cost: u64 = picked.iter().map(|p| self.size(p)).sum();
                best = Some(best.map_or(cost, |b| b.min(cost)));
            }
        }
        best
    }

    pub fn optimal_cover_io(&self, parts: &[Vec<usize>]) -> f64 {
        self.queries
            .iter()
            .filter(|(_, _, hits)| *hits)
            .map(|(attrs, w, _)| w * self.cheapest_cover(parts, attrs).expect("layout covers schema") as f64)
            .sum()
    }
}

/// Every set partition of `0..n`, found by enumerating all maps
/// `attribute → label` and keeping the canonical ones (labels appear in
/// first-use order).
pub fn all_set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    for code in 0..total {
        let mut labels = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            labels.push(c % n);
            c /= n;
        }
        let mut next_new = 0;
        let canonical = labels.iter().all(|&l| {
            if l < next_new {
                true
            } else if l == next_new {
                next_new += 1;
                true
            } else {
                false
            }
        });
        if canonical {
            let parts: Vec<Vec<usize>> = (0..next_new).map(|p| (0..n).filter(|&a| labels[a] == p).collect()).collect();
            out.push(parts);
        }
    }
    out
}

/// Minimum intersecting-cover I/O over all set partitions within budget.
pub fn brute_force_nov(inst: &Instance, alpha: f64) -> f64 {
    let raw = Raw::of(inst);
    all_set_partitions(raw.n())
        .iter()
        .filter(|parts| raw.overhead(parts) <= alpha + 1e-9)
        .map(|parts| raw.intersecting_io(parts))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum optimal-cover I/O over every collection of distinct non-empty
/// attribute subsets that houses all attributes within budget.
pub fn brute_force_ov(inst: &Instance, alpha: f64) -> f64 {
    let raw = Raw::of(inst);
    let n = raw.n();
    let subsets: Vec<Vec<usize>> = (1u64..(1 << n)).map(|m| (0..n).filter(|a| m >> a & 1 == 1).collect()).collect();
    let capacity = raw.block_size() as f64 * (1.0 + alpha) + 1e-9 * raw.block_size() as f64;
    let mut best = f64::INFINITY;
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    collect_ov(&raw, &subsets, 0, 0, capacity, &mut chosen, &mut best);
    best
}

fn collect_ov(
    raw: &Raw,
    subsets: &[Vec<usize>],
    from: usize,
    stored: u64,
    capacity: f64,
    chosen: &mut Vec<Vec<usize>>,
    best: &mut f64,
) {
    let n = raw.n();
    if (0..n).all(|a| chosen.iter().any(|p| p.contains(&a))) {
        *best = best.min(raw.optimal_cover_io(chosen));
    }
    for i in from..subsets.len() {
        let size = raw.size(&subsets[i]);
        if (stored + size) as f64 > capacity {
            continue;
        }
        chosen.push(subsets[i].clone());
        collect_ov(raw, subsets, i + 1, stored + size, capacity, chosen, best);
        chosen.pop();
    }
}

/// A random small instance: `n` attributes, `queries` query kinds.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, queries: usize) -> Instance {
    let sizes: Vec<u64> = (0..n).map(|_| rng.random_range(1..=16)).collect();
    let schema = Schema::from_sizes(&sizes).unwrap();
    let block = TimeRange::new(0, 100).unwrap();
    let qs = (0..queries)
        .map(|i| {
            let mut attrs = AttrSet::EMPTY;
            while attrs.is_empty() {
                attrs = AttrSet::from_bits(rng.random_range(0..1u64 << n));
            }
            let start = rng.random_range(0..=150);
            let time = TimeRange::new(start, start + rng.random_range(0..=20)).unwrap();
            let weight = rng.random_range(1..=8) as f64 / 2.0;
            Query::new(i as u32 + 1, attrs, time, weight).unwrap()
        })
        .collect();
    let workload = Workload::new(&schema, qs).unwrap();
    let stats = BlockStats::new(rng.random_range(1..=50), rng.random_range(1..=20), block).unwrap();
    Instance { schema, workload, stats, consts: CostConstants::default() }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
