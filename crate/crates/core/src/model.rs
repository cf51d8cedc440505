//! Domain types shared by the cost model, the solvers and the harness.
//!
//! Attributes are identified by a dense index into the [`Schema`]; names are
//! carried along for display and file formats only. Attribute subsets are
//! stored as a 64-bit [`AttrSet`], which caps a schema at [`MAX_ATTRIBUTES`].

use std::collections::HashSet;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest schema an [`AttrSet`] can address.
pub const MAX_ATTRIBUTES: usize = 64;

/// Tolerance used for every floating-point budget or cost comparison.
pub const EPSILON: f64 = 1e-9;

/// Returns true when `overhead` respects the budget `alpha` up to [`EPSILON`].
pub fn within_budget(overhead: f64, alpha: f64) -> bool {
    overhead <= alpha + EPSILON
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("schema has no attributes")]
    EmptySchema,
    #[error("schema has {0} attributes, at most {MAX_ATTRIBUTES} are supported")]
    TooManyAttributes(usize),
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("attribute `{0}` has zero size")]
    ZeroSizedAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("invalid time range [{start}, {end}]")]
    InvalidTimeRange { start: i64, end: i64 },
    #[error("query {0} accesses no attributes")]
    EmptyQuery(u32),
    #[error("query {id} has invalid weight {weight}")]
    InvalidWeight { id: u32, weight: f64 },
    #[error("duplicate query id {0}")]
    DuplicateQuery(u32),
    #[error("query {0} references attributes outside the schema")]
    QueryOutsideSchema(u32),
    #[error("block needs at least one edge and one neighbor list (got c_e={edges}, c_n={lists})")]
    EmptyBlock { edges: u64, lists: u64 },
    #[error("cost constants must be positive")]
    InvalidConstants,
    #[error("storage overhead threshold must be a finite non-negative number, got {0}")]
    InvalidAlpha(f64),
}

/// A set of attribute ids, one bit per attribute.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AttrSet(u64);

impl AttrSet {
    pub const EMPTY: AttrSet = AttrSet(0);

    pub fn from_bits(bits: u64) -> Self {
        AttrSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// The set `{0, 1, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ATTRIBUTES);
        if n == MAX_ATTRIBUTES {
            AttrSet(u64::MAX)
        } else {
            AttrSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(id: usize) -> Self {
        assert!(id < MAX_ATTRIBUTES);
        AttrSet(1u64 << id)
    }

    pub fn contains(self, id: usize) -> bool {
        id < MAX_ATTRIBUTES && self.0 & (1u64 << id) != 0
    }

    pub fn with(self, id: usize) -> Self {
        self.union(AttrSet::singleton(id))
    }

    pub fn without(self, id: usize) -> Self {
        self.difference(AttrSet::singleton(id))
    }

    pub fn union(self, other: AttrSet) -> Self {
        AttrSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AttrSet) -> Self {
        AttrSet(self.0 & other.0)
    }

    pub fn difference(self, other: AttrSet) -> Self {
        AttrSet(self.0 & !other.0)
    }

    pub fn intersects(self, other: AttrSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: AttrSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Attribute ids in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let id = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(id)
            }
        })
    }
}

impl FromIterator<usize> for AttrSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(AttrSet::EMPTY, |set, id| set.with(id))
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub id: usize,
    pub name: String,
    /// Bytes per edge.
    pub size: u64,
}

/// The attribute universe of the edges stored in a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

impl Schema {
    /// Builds a schema from `(name, size)` pairs; ids follow the input order.
    pub fn new<S: Into<String>>(attrs: impl IntoIterator<Item = (S, u64)>) -> Result<Self, ModelError> {
        let attributes: Vec<Attribute> =
            attrs.into_iter().enumerate().map(|(id, (name, size))| Attribute { id, name: name.into(), size }).collect();
        if attributes.is_empty() {
            return Err(ModelError::EmptySchema);
        }
        if attributes.len() > MAX_ATTRIBUTES {
            return Err(ModelError::TooManyAttributes(attributes.len()));
        }
        let mut seen = HashSet::new();
        for attr in &attributes {
            if attr.size == 0 {
                return Err(ModelError::ZeroSizedAttribute(attr.name.clone()));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(ModelError::DuplicateAttribute(attr.name.clone()));
            }
        }
        Ok(Schema { attributes })
    }

    /// Schema with generated names `a1..an`.
    pub fn from_sizes(sizes: &[u64]) -> Result<Self, ModelError> {
        Schema::new(sizes.iter().enumerate().map(|(i, &s)| (format!("a{}", i + 1), s)))
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, id: usize) -> &Attribute {
        &self.attributes[id]
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Resolves attribute names into a set.
    pub fn set_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<AttrSet, ModelError> {
        names.into_iter().map(|n| self.id_of(n).ok_or_else(|| ModelError::UnknownAttribute(n.to_string()))).collect()
    }

    pub fn full_set(&self) -> AttrSet {
        AttrSet::full(self.len())
    }

    /// Σ s(a) over the whole schema.
    pub fn total_attr_size(&self) -> u64 {
        self.attributes.iter().map(|a| a.size).sum()
    }

    /// Σ s(a) over `attrs`.
    pub fn attr_bytes(&self, attrs: AttrSet) -> u64 {
        attrs.iter().map(|id| self.attributes[id].size).sum()
    }

    pub fn names(&self, attrs: AttrSet) -> Vec<&str> {
        attrs.iter().map(|id| self.attributes[id].name.as_str()).collect()
    }

    /// Renders a set as `{a1,a2}`.
    pub fn format_set(&self, attrs: AttrSet) -> String {
        format!("{{{}}}", self.names(attrs).join(","))
    }
}

/// A closed interval of timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeRange {
    start: i64,
    end: i64,
}

impl TimeRange {
    pub fn new(start: i64, end: i64) -> Result<Self, ModelError> {
        if start > end {
            return Err(ModelError::InvalidTimeRange { start, end });
        }
        Ok(TimeRange { start, end })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn overlaps(&self, other: &TimeRange) -> bool {
        time_overlaps(self, other)
    }
}

/// Closed-interval intersection test: touching endpoints count as overlap.
pub fn time_overlaps(x: &TimeRange, y: &TimeRange) -> bool {
    x.start <= y.end && y.start <= x.end
}

/// A query kind: the attributes it reads, the time range it traverses and
/// its relative frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    id: u32,
    attrs: AttrSet,
    time: TimeRange,
    weight: f64,
}

impl Query {
    pub fn new(id: u32, attrs: AttrSet, time: TimeRange, weight: f64) -> Result<Self, ModelError> {
        if attrs.is_empty() {
            return Err(ModelError::EmptyQuery(id));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(ModelError::InvalidWeight { id, weight });
        }
        Ok(Query { id, attrs, time, weight })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn attrs(&self) -> AttrSet {
        self.attrs
    }

    pub fn time(&self) -> TimeRange {
        self.time
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(&self, weight: f64) -> Result<Self, ModelError> {
        Query::new(self.id, self.attrs, self.time, weight)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workload {
    queries: Vec<Query>,
}

impl Workload {
    pub fn new(schema: &Schema, queries: Vec<Query>) -> Result<Self, ModelError> {
        let universe = schema.full_set();
        let mut ids = HashSet::new();
        for q in &queries {
            if !ids.insert(q.id) {
                return Err(ModelError::DuplicateQuery(q.id));
            }
            if !q.attrs.is_subset_of(universe) {
                return Err(ModelError::QueryOutsideSchema(q.id));
            }
        }
        Ok(Workload { queries })
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// f(a): total weight of the queries that access attribute `id`.
    pub fn frequency(&self, id: usize) -> f64 {
        self.queries.iter().filter(|q| q.attrs.contains(id)).map(|q| q.weight).sum()
    }

    /// Attributes accessed by at least one query.
    pub fn accessed(&self) -> AttrSet {
        self.queries.iter().fold(AttrSet::EMPTY, |acc, q| acc.union(q.attrs))
    }

    pub fn total_weight(&self) -> f64 {
        self.queries.iter().map(|q| q.weight).sum()
    }
}

/// Structural counts of one disk block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockStats {
    edges: u64,
    neighbor_lists: u64,
    time: TimeRange,
}

impl BlockStats {
    pub fn new(edges: u64, neighbor_lists: u64, time: TimeRange) -> Result<Self, ModelError> {
        if edges == 0 || neighbor_lists == 0 {
            return Err(ModelError::EmptyBlock { edges, lists: neighbor_lists });
        }
        Ok(BlockStats { edges, neighbor_lists, time })
    }

    /// c_e: number of edges in the block.
    pub fn edges(&self) -> u64 {
        self.edges
    }

    /// c_n: number of temporal neighbor lists in the block.
    pub fn neighbor_lists(&self) -> u64 {
        self.neighbor_lists
    }

    pub fn time(&self) -> TimeRange {
        self.time
    }
}

/// Per-edge and per-neighbor-list bytes of graph structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostConstants {
    /// Edge id plus timestamp.
    pub per_edge_structure: u64,
    /// Head vertex plus entry count.
    pub per_neighbor_list: u64,
}

impl CostConstants {
    pub fn new(per_edge_structure: u64, per_neighbor_list: u64) -> Result<Self, ModelError> {
        if per_edge_structure == 0 || per_neighbor_list == 0 {
            return Err(ModelError::InvalidConstants);
        }
        Ok(CostConstants { per_edge_structure, per_neighbor_list })
    }
}

impl Default for CostConstants {
    fn default() -> Self {
        CostConstants { per_edge_structure: 16, per_neighbor_list: 12 }
    }
}

/// Everything needed to optimize one block.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub schema: Schema,
    pub workload: Workload,
    pub stats: BlockStats,
    pub consts: CostConstants,
}

impl Instance {
    pub fn new(schema: Schema, workload: Workload, stats: BlockStats) -> Self {
        Instance { schema, workload, stats, consts: CostConstants::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    NonOverlapping,
    Overlapping,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::NonOverlapping => "non_overlapping",
            Flavor::Overlapping => "overlapping",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("layout has no sub-blocks")]
    NoSubBlocks,
    #[error("sub-block {0} is empty")]
    EmptySubBlock(usize),
    #[error("sub-block {index} references attributes outside the schema")]
    UnknownAttribute { index: usize },
    #[error("sub-blocks {first} and {second} hold identical attributes")]
    Duplicate { first: usize, second: usize },
    #[error("sub-blocks {first} and {second} overlap on {shared:?} in a non-overlapping layout")]
    Overlap { first: usize, second: usize, shared: AttrSet },
    #[error("coverage gap: attributes {missing:?} are not housed by any sub-block")]
    CoverageGap { missing: AttrSet },
}

/// The partitioning of one block into sub-blocks, each holding a subset of
/// the attributes next to its own copy of the graph structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    sub_blocks: Vec<AttrSet>,
    flavor: Flavor,
}

impl Layout {
    /// Validated constructor.
    pub fn new(sub_blocks: Vec<AttrSet>, flavor: Flavor, schema: &Schema) -> Result<Self, LayoutError> {
        let layout = Layout { sub_blocks, flavor };
        validate_layout(&layout, schema)?;
        Ok(layout)
    }

    /// Builds a layout without checking it; see [`validate_layout`].
    pub fn from_parts(sub_blocks: Vec<AttrSet>, flavor: Flavor) -> Self {
        Layout { sub_blocks, flavor }
    }

    pub fn sub_blocks(&self) -> &[AttrSet] {
        &self.sub_blocks
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn len(&self) -> usize {
        self.sub_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sub_blocks.is_empty()
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    /// Sub-blocks in ascending bit order, for order-insensitive comparison.
    pub fn canonical(&self) -> Vec<AttrSet> {
        let mut blocks = self.sub_blocks.clone();
        blocks.sort_unstable();
        blocks
    }

    /// True when both layouts hold the same sub-blocks, in any order.
    pub fn same_sub_blocks(&self, other: &Layout) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = AttrSet::EMPTY;
        for &b in &self.sub_blocks {
            if seen.intersects(b) {
                return false;
            }
            seen = seen.union(b);
        }
        true
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> LayoutDisplay<'a> {
        LayoutDisplay { layout: self, schema }
    }
}

pub struct LayoutDisplay<'a> {
    layout: &'a Layout,
    schema: &'a Schema,
}

impl fmt::Display for LayoutDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.layout.sub_blocks.iter().map(|&b| self.schema.format_set(b)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Checks every layout invariant against `schema`, reporting the first one
/// that fails.
pub fn validate_layout(layout: &Layout, schema: &Schema) -> Result<(), LayoutError> {
    if layout.sub_blocks.is_empty() {
        return Err(LayoutError::NoSubBlocks);
    }
    let universe = schema.full_set();
    for (index, &b) in layout.sub_blocks.iter().enumerate() {
        if b.is_empty() {
            return Err(LayoutError::EmptySubBlock(index));
        }
        if !b.is_subset_of(universe) {
            return Err(LayoutError::UnknownAttribute { index });
        }
    }
    for (first, &x) in layout.sub_blocks.iter().enumerate() {
        for (offset, &y) in layout.sub_blocks[first + 1..].iter().enumerate() {
            let second = first + 1 + offset;
            if x == y {
                return Err(LayoutError::Duplicate { first, second });
            }
            if layout.flavor == Flavor::NonOverlapping && x.intersects(y) {
                return Err(LayoutError::Overlap { first, second, shared: x.intersection(y) });
            }
        }
    }
    let covered = layout.sub_blocks.iter().fold(AttrSet::EMPTY, |acc, &b| acc.union(b));
    if covered != universe {
        return Err(LayoutError::CoverageGap { missing: universe.difference(covered) });
    }
    Ok(())
}

/// Storage budget and search limits for the optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Storage-overhead threshold α; layouts must satisfy H ≤ α.
    pub alpha: f64,
    /// Maximum search nodes for the exact solvers.
    pub node_limit: Option<u64>,
    /// Wall-clock budget for the exact solvers.
    pub time_limit: Option<Duration>,
    /// Largest schema the set-partition enumeration accepts.
    pub enumeration_limit: usize,
}

impl OptimizerConfig {
    pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

    pub fn new(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        Ok(OptimizerConfig {
            alpha,
            node_limit: None,
            time_limit: None,
            enumeration_limit: Self::DEFAULT_ENUMERATION_LIMIT,
        })
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_schema() -> Schema {
        Schema::new([("a1", 4), ("a2", 8), ("a3", 4)]).unwrap()
    }

    fn set(schema: &Schema, names: &[&str]) -> AttrSet {
        schema.set_of(names.iter().copied()).unwrap()
    }

    fn range(s: i64, e: i64) -> TimeRange {
        TimeRange::new(s, e).unwrap()
    }

    #[test]
    fn disjoint_cover_is_valid() {
        let s = fixture_schema();
        let layout = Layout::from_parts(vec![set(&s, &["a1", "a2"]), set(&s, &["a3"])], Flavor::NonOverlapping);
        assert_eq!(validate_layout(&layout, &s), Ok(()));
    }

    #[test]
    fn coverage_gap_is_reported_for_both_flavors() {
        let s = fixture_schema();
        for flavor in [Flavor::NonOverlapping, Flavor::Overlapping] {
            let layout = Layout::from_parts(vec![set(&s, &["a1", "a2"])], flavor);
            assert_eq!(validate_layout(&layout, &s), Err(LayoutError::CoverageGap { missing: set(&s, &["a3"]) }));
        }
    }

    #[test]
    fn overlap_only_rejected_when_non_overlapping() {
        let s = fixture_schema();
        let blocks = vec![set(&s, &["a1", "a2"]), set(&s, &["a2", "a3"])];
        let nov = Layout::from_parts(blocks.clone(), Flavor::NonOverlapping);
        assert!(matches!(validate_layout(&nov, &s), Err(LayoutError::Overlap { first: 0, second: 1, .. })));
        let ov = Layout::from_parts(blocks, Flavor::Overlapping);
        assert_eq!(validate_layout(&ov, &s), Ok(()));
    }

    #[test]
    fn duplicate_and_empty_sub_blocks() {
        let s = fixture_schema();
        let dup = Layout::from_parts(vec![s.full_set(), s.full_set()], Flavor::Overlapping);
        assert_eq!(validate_layout(&dup, &s), Err(LayoutError::Duplicate { first: 0, second: 1 }));
        let empty = Layout::from_parts(vec![s.full_set(), AttrSet::EMPTY], Flavor::Overlapping);
        assert_eq!(validate_layout(&empty, &s), Err(LayoutError::EmptySubBlock(1)));
        let none = Layout::from_parts(vec![], Flavor::Overlapping);
        assert_eq!(validate_layout(&none, &s), Err(LayoutError::NoSubBlocks));
    }

    #[test]
    fn single_sub_block_is_valid_for_both_flavors() {
        let s = fixture_schema();
        for flavor in [Flavor::NonOverlapping, Flavor::Overlapping] {
            assert!(Layout::new(vec![s.full_set()], flavor, &s).is_ok());
        }
    }

    #[test]
    fn time_overlap_is_closed() {
        assert!(!time_overlaps(&range(0, 5), &range(6, 9)));
        assert!(time_overlaps(&range(0, 5), &range(5, 9)));
        assert!(time_overlaps(&range(10, 20), &range(0, 100)));
        assert!(TimeRange::new(3, 2).is_err());
    }

    #[test]
    fn schema_rejects_bad_input() {
        assert_eq!(Schema::new(Vec::<(String, u64)>::new()), Err(ModelError::EmptySchema));
        assert!(matches!(Schema::new([("a", 1), ("a", 2)]), Err(ModelError::DuplicateAttribute(_))));
        assert!(matches!(Schema::new([("a", 0)]), Err(ModelError::ZeroSizedAttribute(_))));
        assert!(matches!(Schema::from_sizes(&[1; 65]), Err(ModelError::TooManyAttributes(65))));
        assert_eq!(fixture_schema().total_attr_size(), 16);
    }

    #[test]
    fn query_and_workload_invariants() {
        let s = fixture_schema();
        let t = range(0, 1);
        assert_eq!(Query::new(1, AttrSet::EMPTY, t, 1.0), Err(ModelError::EmptyQuery(1)));
        assert!(Query::new(1, s.full_set(), t, 0.0).is_err());
        assert!(Query::new(1, s.full_set(), t, f64::NAN).is_err());
        let q = Query::new(1, s.full_set(), t, 1.0).unwrap();
        assert_eq!(Workload::new(&s, vec![q.clone(), q.clone()]), Err(ModelError::DuplicateQuery(1)));
        let outside = Query::new(2, AttrSet::singleton(5), t, 1.0).unwrap();
        assert_eq!(Workload::new(&s, vec![outside]), Err(ModelError::QueryOutsideSchema(2)));
    }

    #[test]
    fn frequencies() {
        let s = fixture_schema();
        let t = range(0, 1);
        let w = Workload::new(
            &s,
            vec![
                Query::new(1, set(&s, &["a1", "a2"]), t, 2.0).unwrap(),
                Query::new(2, set(&s, &["a3"]), t, 1.0).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(w.frequency(0), 2.0);
        assert_eq!(w.frequency(1), 2.0);
        assert_eq!(w.frequency(2), 1.0);
        assert_eq!(w.accessed(), s.full_set());
    }

    #[test]
    fn attr_set_ops() {
        let a: AttrSet = [0, 3, 5].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(a.contains(3) && !a.contains(4));
        assert_eq!(a.without(3).with(4).iter().collect::<Vec<_>>(), vec![0, 4, 5]);
        assert_eq!(AttrSet::full(64).len(), 64);
        assert_eq!(format!("{a:?}"), "{0, 3, 5}");
    }

    #[test]
    fn rejects_negative_alpha() {
        assert!(OptimizerConfig::new(-0.1).is_err());
        assert!(OptimizerConfig::new(f64::INFINITY).is_err());
        assert!(OptimizerConfig::new(0.0).is_ok());
    }
}
