//! Seeded random workload and block generator.
//!
//! Defaults: 10 attributes with sizes drawn from Zipf(z=0.5) over
//! {4, 1, 8, 2, 16, 32, 64} bytes, query lengths from Normal(3, 2) rounded
//! and clamped to [1, |A|], 5 query kinds with Zipf(z=0.5) frequencies, and
//! a storage-overhead threshold of 1.0. All randomness comes from a ChaCha8
//! stream seeded with [`WorkloadSpec::seed`].

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BlockStats, Instance, ModelError, Query, Schema, TimeRange, Workload, MAX_ATTRIBUTES};

/// Timestamps of generated blocks span `[0, BLOCK_SPAN]`.
pub const BLOCK_SPAN: i64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid workload spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadSpec {
    pub n_attributes: usize,
    pub attr_size_choices: Vec<u64>,
    pub attr_size_zipf_z: f64,
    pub query_len_mean: f64,
    pub query_len_stddev: f64,
    pub n_query_kinds: usize,
    pub query_freq_zipf_z: f64,
    pub alpha: f64,
    pub block_c_e: u64,
    pub block_c_n: u64,
    /// The last this-many query kinds get time ranges after the block's.
    pub time_disjoint_queries: usize,
    pub seed: u64,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            n_attributes: 10,
            attr_size_choices: vec![4, 1, 8, 2, 16, 32, 64],
            attr_size_zipf_z: 0.5,
            query_len_mean: 3.0,
            query_len_stddev: 2.0,
            n_query_kinds: 5,
            query_freq_zipf_z: 0.5,
            alpha: 1.0,
            block_c_e: 1000,
            block_c_n: 100,
            time_disjoint_queries: 0,
            seed: 1,
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let fail = |msg: &str| Err(SpecError::Invalid(msg.to_string()));
        if self.n_attributes == 0 || self.n_attributes > MAX_ATTRIBUTES {
            return fail("n_attributes must be in 1..=64");
        }
        if self.n_query_kinds == 0 {
            return fail("n_query_kinds must be at least 1");
        }
        if self.attr_size_choices.is_empty() || self.attr_size_choices.contains(&0) {
            return fail("attr_size_choices must be non-empty and positive");
        }
        let non_negative = |x: f64| x.is_finite() && x >= 0.0;
        if !non_negative(self.attr_size_zipf_z) || !non_negative(self.query_freq_zipf_z) {
            return fail("zipf exponents must be finite and non-negative");
        }
        if !self.query_len_mean.is_finite() || !non_negative(self.query_len_stddev) {
            return fail("query length mean must be finite and stddev non-negative");
        }
        if !non_negative(self.alpha) {
            return fail("alpha must be finite and non-negative");
        }
        if self.block_c_e == 0 || self.block_c_n == 0 {
            return fail("block_c_e and block_c_n must be positive");
        }
        if self.time_disjoint_queries > self.n_query_kinds {
            return fail("time_disjoint_queries exceeds n_query_kinds");
        }
        Ok(())
    }
}

/// Zipf distribution over `1..=n` with P(i) ∝ 1 / i^z.
#[derive(Debug, Clone)]
pub struct Zipf {
    index: WeightedIndex<f64>,
}

impl Zipf {
    pub fn new(n: usize, z: f64) -> Self {
        assert!(n >= 1 && z >= 0.0, "zipf needs n >= 1 and z >= 0");
        let weights = (1..=n).map(|i| (i as f64).powf(-z));
        Zipf { index: WeightedIndex::new(weights).expect("positive finite weights") }
    }

    /// A rank in `1..=n`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng) + 1
    }
}

pub fn zipf_sample<R: Rng + ?Sized>(rng: &mut R, n: usize, z: f64) -> usize {
    Zipf::new(n, z).sample(rng)
}

/// Normal draw rounded to the nearest integer and clamped to `[1, n_attributes]`.
pub fn query_length_sample<R: Rng + ?Sized>(rng: &mut R, spec: &WorkloadSpec) -> usize {
    let normal = Normal::new(spec.query_len_mean, spec.query_len_stddev).expect("validated spec");
    let draw: f64 = normal.sample(rng);
    draw.round().clamp(1.0, spec.n_attributes as f64) as usize
}

/// Generates one block and the workload that reaches it. Deterministic in
/// `spec`, including its seed.
pub fn generate(spec: &WorkloadSpec) -> Result<Instance, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let size_rank = Zipf::new(spec.attr_size_choices.len(), spec.attr_size_zipf_z);
    let sizes: Vec<u64> =
        (0..spec.n_attributes).map(|_| spec.attr_size_choices[size_rank.sample(&mut rng) - 1]).collect();
    let schema = Schema::from_sizes(&sizes)?;

    let block_time = TimeRange::new(0, BLOCK_SPAN)?;
    let norm: f64 = (1..=spec.n_query_kinds).map(|i| (i as f64).powf(-spec.query_freq_zipf_z)).sum();
    let first_disjoint = spec.n_query_kinds - spec.time_disjoint_queries;
    let mut queries = Vec::with_capacity(spec.n_query_kinds);
    for i in 0..spec.n_query_kinds {
        let len = query_length_sample(&mut rng, spec);
        let attrs = index::sample(&mut rng, spec.n_attributes, len).into_iter().collect();
        let start = rng.random_range(0..=BLOCK_SPAN);
        let end = rng.random_range(start..=BLOCK_SPAN);
        let time = if i >= first_disjoint {
            TimeRange::new(start + 2 * BLOCK_SPAN, end + 2 * BLOCK_SPAN)?
        } else {
            TimeRange::new(start, end)?
        };
        let weight = ((i + 1) as f64).powf(-spec.query_freq_zipf_z) / norm;
        queries.push(Query::new(i as u32 + 1, attrs, time, weight)?);
    }
    let workload = Workload::new(&schema, queries)?;
    let stats = BlockStats::new(spec.block_c_e, spec.block_c_n, block_time)?;
    Ok(Instance::new(schema, workload, stats))
}
