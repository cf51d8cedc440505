#[path = "common/oracle.rs"]
mod oracle;

use proptest::prelude::*;
use railway_core::cost::covering_sub_blocks_nov;
use railway_core::exact::{optimal_cover_cost, solve_exact_nov};
use railway_core::heuristic::{greedy_nov, greedy_ov, greedy_ov_traced, single_partition};
use railway_core::model::time_overlaps;
use railway_core::simulate::{generate, WorkloadSpec};
use railway_core::{AttrSet, CostModel, CoverRule, Flavor, Instance, Layout, OptimizerConfig, TimeRange, Workload};
use rand::Rng;

/// A random non-overlapping layout of `n` attributes.
fn random_partition(rng: &mut impl Rng, n: usize) -> Vec<AttrSet> {
    let k = rng.random_range(1..=n);
    let mut parts = vec![AttrSet::EMPTY; k];
    for a in 0..n {
        let p = if a < k { a } else { rng.random_range(0..k) };
        parts[p] = parts[p].with(a);
    }
    parts
}

/// A random collection of distinct subsets that houses every attribute.
fn random_cover(rng: &mut impl Rng, n: usize) -> Vec<AttrSet> {
    let mut blocks: Vec<AttrSet> = Vec::new();
    let full = AttrSet::full(n);
    let housed = |bs: &[AttrSet]| bs.iter().fold(AttrSet::EMPTY, |acc, b| acc.union(*b));
    while housed(&blocks) != full || rng.random_bool(0.3) {
        let b = AttrSet::from_bits(rng.random_range(1..1u64 << n));
        if !blocks.contains(&b) {
            blocks.push(b);
        }
    }
    blocks
}

fn to_lists(blocks: &[AttrSet]) -> Vec<Vec<usize>> {
    blocks.iter().map(|b| b.iter().collect()).collect()
}

fn instance(seed: u64, n: usize, q: usize) -> (Instance, rand_chacha::ChaCha8Rng) {
    let mut rng = oracle::rng(seed);
    let inst = oracle::random_instance(&mut rng, n, q);
    (inst, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sizes_match_reference(seed: u64, n in 1usize..8) {
        let (inst, mut rng) = instance(seed, n, 1);
        let raw = oracle::Raw::of(&inst);
        let cost = CostModel::for_instance(&inst);
        prop_assert_eq!(cost.block_size(), raw.block_size());
        for b in random_cover(&mut rng, n) {
            let list: Vec<usize> = b.iter().collect();
            prop_assert_eq!(cost.sub_block_size(b), raw.size(&list));
            prop_assert_eq!(cost.sub_block_size(b), cost.structure_bytes() + cost.attr_bytes(b));
        }
    }

    #[test]
    fn overhead_formulas_agree(seed: u64, n in 1usize..10) {
        let (inst, mut rng) = instance(seed, n, 1);
        let cost = CostModel::for_instance(&inst);
        let parts = random_partition(&mut rng, n);
        let layout = Layout::new(parts.clone(), Flavor::NonOverlapping, &inst.schema).unwrap();
        let by_count = cost.storage_overhead_nov(&layout).unwrap();
        let by_sizes = cost.overhead_of(&parts);
        prop_assert!((by_count - by_sizes).abs() <= 1e-9);
        prop_assert!((by_sizes - oracle::Raw::of(&inst).overhead(&to_lists(&parts))).abs() <= 1e-9);
    }

    #[test]
    fn overhead_grows_with_parts(seed: u64, n in 2usize..10) {
        let (inst, _) = instance(seed, n, 1);
        let cost = CostModel::for_instance(&inst);
        prop_assert_eq!(cost.overhead_for_parts(1), 0.0);
        for k in 1..n {
            prop_assert!(cost.overhead_for_parts(k + 1) > cost.overhead_for_parts(k));
        }
    }

    #[test]
    fn intersecting_io_matches_reference(seed: u64, n in 1usize..8, q in 1usize..6) {
        let (inst, mut rng) = instance(seed, n, q);
        let cost = CostModel::for_instance(&inst);
        let parts = random_partition(&mut rng, n);
        let layout = Layout::new(parts.clone(), Flavor::NonOverlapping, &inst.schema).unwrap();
        let ours = cost.query_io(&layout, &inst.workload).query_io;
        let theirs = oracle::Raw::of(&inst).intersecting_io(&to_lists(&parts));
        prop_assert!((ours - theirs).abs() <= 1e-9 * theirs.max(1.0));
        // The greedy cover reads exactly the intersecting sub-blocks of a partition.
        for query in inst.workload.queries() {
            let mut greedy = cost.greedy_cover(&parts, query.attrs());
            greedy.sort_unstable();
            prop_assert_eq!(greedy, covering_sub_blocks_nov(&layout, query));
        }
    }

    #[test]
    fn greedy_cover_covers(seed: u64, n in 1usize..8, q in 1usize..6) {
        let (inst, mut rng) = instance(seed, n, q);
        let cost = CostModel::for_instance(&inst);
        let blocks = random_cover(&mut rng, n);
        let layout = Layout::new(blocks.clone(), Flavor::Overlapping, &inst.schema).unwrap();
        let raw = oracle::Raw::of(&inst);
        for query in inst.workload.queries() {
            let chosen = cost.greedy_cover(&blocks, query.attrs());
            let covered = chosen.iter().fold(AttrSet::EMPTY, |acc, &i| acc.union(blocks[i]));
            prop_assert!(query.attrs().is_subset_of(covered));
            prop_assert!(chosen.len() <= query.attrs().len());
            let greedy_bytes = cost.cover_bytes(&blocks, query.attrs(), CoverRule::Greedy);
            let (best, _) = optimal_cover_cost(&cost, &layout, query).unwrap();
            let reference = raw.cheapest_cover(&to_lists(&blocks), &query.attrs().iter().collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(best, reference);
            prop_assert!(best <= greedy_bytes);
        }
    }

    #[test]
    fn io_is_linear_in_weights(seed: u64, n in 1usize..7, q in 1usize..6, scale in 0.1f64..10.0) {
        let (inst, mut rng) = instance(seed, n, q);
        let cost = CostModel::for_instance(&inst);
        let blocks = random_cover(&mut rng, n);
        let scaled: Vec<_> = inst.workload.queries().iter().map(|q| q.with_weight(q.weight() * scale).unwrap()).collect();
        let scaled = Workload::new(&inst.schema, scaled).unwrap();
        for rule in [CoverRule::Greedy, CoverRule::Intersecting] {
            let base = cost.io_of(&blocks, &inst.workload, rule);
            let big = cost.io_of(&blocks, &scaled, rule);
            prop_assert!((big - scale * base).abs() <= 1e-9 * big.max(1.0));
        }
    }

    #[test]
    fn frequency_is_weight_sum(seed: u64, n in 1usize..8, q in 1usize..6) {
        let (inst, _) = instance(seed, n, q);
        for a in 0..n {
            let expected: f64 = inst.workload.queries().iter().filter(|q| q.attrs().contains(a)).map(|q| q.weight()).sum();
            prop_assert!((inst.workload.frequency(a) - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn time_overlap_is_symmetric(a in -50i64..50, b in 0i64..30, c in -50i64..50, d in 0i64..30) {
        let x = TimeRange::new(a, a + b).unwrap();
        let y = TimeRange::new(c, c + d).unwrap();
        prop_assert_eq!(time_overlaps(&x, &y), time_overlaps(&y, &x));
        prop_assert!(time_overlaps(&x, &x));
        prop_assert_eq!(time_overlaps(&x, &y), a <= c + d && c <= a + b);
    }

    #[test]
    fn heuristics_respect_budget(seed: u64, n in 1usize..9, q in 1usize..6, alpha in 0.0f64..2.0) {
        let (inst, _) = instance(seed, n, q);
        let config = OptimizerConfig::new(alpha).unwrap();
        let cost = CostModel::for_instance(&inst);
        let single = cost.query_io(&single_partition(&inst.schema), &inst.workload).query_io;
        let nov = greedy_nov(&inst, &config);
        prop_assert!(cost.storage_overhead(&nov) <= alpha + 1e-9);
        prop_assert!(nov.is_disjoint());
        prop_assert!(cost.query_io(&nov, &inst.workload).query_io <= single + 1e-9);
        let (ov, merges) = greedy_ov_traced(&inst, &config);
        prop_assert!(cost.storage_overhead(&ov) <= alpha + 1e-9);
        prop_assert!(merges.len() < q + 1);
        prop_assert_eq!(greedy_ov(&inst, &config), ov);
    }

    #[test]
    fn exact_nov_improves_with_budget(seed: u64, n in 1usize..7, q in 1usize..5) {
        let (inst, _) = instance(seed, n, q);
        let mut last = f64::INFINITY;
        for alpha in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let sol = solve_exact_nov(&inst, &OptimizerConfig::new(alpha).unwrap()).unwrap();
            prop_assert!(sol.objective <= last + 1e-9);
            last = sol.objective;
        }
    }

    #[test]
    fn generation_is_reproducible(seed: u64, n in 1usize..20, q in 1usize..10) {
        let spec = WorkloadSpec { n_attributes: n, n_query_kinds: q, seed, ..Default::default() };
        let a = generate(&spec).unwrap();
        prop_assert_eq!(&a, &generate(&spec).unwrap());
        let total: f64 = a.workload.queries().iter().map(|q| q.weight()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for attr in a.schema.attributes() {
            prop_assert!(spec.attr_size_choices.contains(&attr.size));
        }
        for query in a.workload.queries() {
            prop_assert!((1..=n).contains(&query.attrs().len()));
            prop_assert!(query.time().overlaps(&a.stats.time()));
        }
    }
}
