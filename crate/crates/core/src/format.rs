//! TOML file formats for instances, workload specs and layout catalogs.
//!
//! Every file carries `format_version = 1`. Attributes are referred to by
//! name; query and layout attribute lists are arrays of names.
//!
//! ```toml
//! format_version = 1
//!
//! [block]
//! c_e = 10
//! c_n = 2
//! t_start = 0
//! t_end = 100
//!
//! [[attribute]]
//! name = "a1"
//! size = 4
//!
//! [[query]]
//! id = 1
//! attrs = ["a1"]
//! weight = 2.0
//! t_start = 10
//! t_end = 20
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AttrSet, BlockStats, CostConstants, Flavor, Instance, Layout, LayoutError, ModelError, Query, Schema, TimeRange,
    Workload,
};
use crate::simulate::WorkloadSpec;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unsupported format_version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("{context}: {source}")]
    Model { context: String, source: ModelError },
    #[error("{context}: {source}")]
    Layout { context: String, source: LayoutError },
    #[error("catalog entries {first} and {second} have overlapping time ranges")]
    OverlappingEntries { first: usize, second: usize },
    #[error("could not serialize: {0}")]
    Serialize(String),
}

fn model_err(context: impl Into<String>) -> impl FnOnce(ModelError) -> FormatError {
    let context = context.into();
    move |source| FormatError::Model { context, source }
}

fn check_version(found: u32) -> Result<(), FormatError> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version { found })
    }
}

/// Parses `text` as TOML. `origin` names the source in error messages;
/// the toml error already carries line and column.
pub fn parse<T: DeserializeOwned>(text: &str, origin: &Path) -> Result<T, FormatError> {
    toml::from_str(text).map_err(|e| FormatError::Parse { path: origin.to_path_buf(), message: e.to_string() })
}

pub fn read_file<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
    parse(&text, path)
}

pub fn to_toml<T: Serialize>(value: &T) -> Result<String, FormatError> {
    toml::to_string(value).map_err(|e| FormatError::Serialize(e.to_string()))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeEntry {
    name: String,
    size: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockEntry {
    c_e: u64,
    c_n: u64,
    t_start: i64,
    t_end: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryEntry {
    id: u32,
    attrs: Vec<String>,
    weight: f64,
    t_start: i64,
    t_end: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format_version: u32,
    block: BlockEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constants: Option<CostConstants>,
    attribute: Vec<AttributeEntry>,
    #[serde(default)]
    query: Vec<QueryEntry>,
}

fn schema_from(entries: &[AttributeEntry]) -> Result<Schema, FormatError> {
    Schema::new(entries.iter().map(|a| (a.name.clone(), a.size))).map_err(model_err("attribute list"))
}

fn attribute_entries(schema: &Schema) -> Vec<AttributeEntry> {
    schema.attributes().iter().map(|a| AttributeEntry { name: a.name.clone(), size: a.size }).collect()
}

fn names(schema: &Schema, attrs: AttrSet) -> Vec<String> {
    schema.names(attrs).into_iter().map(String::from).collect()
}

pub fn instance_from_str(text: &str, origin: &Path) -> Result<Instance, FormatError> {
    let file: InstanceFile = parse(text, origin)?;
    check_version(file.format_version)?;
    let schema = schema_from(&file.attribute)?;
    let mut queries = Vec::with_capacity(file.query.len());
    for q in &file.query {
        let context = format!("query {}", q.id);
        let attrs = schema.set_of(q.attrs.iter().map(String::as_str)).map_err(model_err(context.clone()))?;
        let time = TimeRange::new(q.t_start, q.t_end).map_err(model_err(context.clone()))?;
        queries.push(Query::new(q.id, attrs, time, q.weight).map_err(model_err(context))?);
    }
    let workload = Workload::new(&schema, queries).map_err(model_err("workload"))?;
    let b = &file.block;
    let time = TimeRange::new(b.t_start, b.t_end).map_err(model_err("block"))?;
    let stats = BlockStats::new(b.c_e, b.c_n, time).map_err(model_err("block"))?;
    let consts = match file.constants {
        Some(c) => CostConstants::new(c.per_edge_structure, c.per_neighbor_list).map_err(model_err("constants"))?,
        None => CostConstants::default(),
    };
    Ok(Instance { schema, workload, stats, consts })
}

pub fn instance_to_string(instance: &Instance) -> Result<String, FormatError> {
    let stats = instance.stats;
    let file = InstanceFile {
        format_version: FORMAT_VERSION,
        block: BlockEntry {
            c_e: stats.edges(),
            c_n: stats.neighbor_lists(),
            t_start: stats.time().start(),
            t_end: stats.time().end(),
        },
        constants: (instance.consts != CostConstants::default()).then_some(instance.consts),
        attribute: attribute_entries(&instance.schema),
        query: instance
            .workload
            .queries()
            .iter()
            .map(|q| QueryEntry {
                id: q.id(),
                attrs: names(&instance.schema, q.attrs()),
                weight: q.weight(),
                t_start: q.time().start(),
                t_end: q.time().end(),
            })
            .collect(),
    };
    to_toml(&file)
}

pub fn load_instance(path: &Path) -> Result<Instance, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
    instance_from_str(&text, path)
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<(), FormatError> {
    write_file(path, &instance_to_string(instance)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    format_version: u32,
    workload: WorkloadSpec,
}

pub fn spec_from_str(text: &str, origin: &Path) -> Result<WorkloadSpec, FormatError> {
    let file: SpecFile = parse(text, origin)?;
    check_version(file.format_version)?;
    Ok(file.workload)
}

pub fn spec_to_string(spec: &WorkloadSpec) -> Result<String, FormatError> {
    to_toml(&SpecFile { format_version: FORMAT_VERSION, workload: spec.clone() })
}

/// Layouts of consecutive blocks of one vertex range, keyed by the
/// disjoint time ranges they cover.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutCatalog {
    schema: Schema,
    entries: Vec<(TimeRange, Layout)>,
}

impl LayoutCatalog {
    pub fn new(schema: Schema) -> Self {
        LayoutCatalog { schema, entries: Vec::new() }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn entries(&self) -> &[(TimeRange, Layout)] {
        &self.entries
    }

    /// Adds an entry; rejects invalid layouts and ranges that overlap an
    /// existing entry.
    pub fn insert(&mut self, range: TimeRange, layout: Layout) -> Result<(), FormatError> {
        let index = self.entries.len();
        crate::model::validate_layout(&layout, &self.schema)
            .map_err(|source| FormatError::Layout { context: format!("catalog entry {index}"), source })?;
        if let Some(first) = self.entries.iter().position(|(r, _)| r.overlaps(&range)) {
            return Err(FormatError::OverlappingEntries { first, second: index });
        }
        self.entries.push((range, layout));
        Ok(())
    }

    /// The layout whose range contains `t`.
    pub fn lookup(&self, t: i64) -> Option<&Layout> {
        self.entries.iter().find(|(r, _)| r.start() <= t && t <= r.end()).map(|(_, l)| l)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogEntry {
    t_start: i64,
    t_end: i64,
    flavor: Flavor,
    sub_blocks: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    format_version: u32,
    attribute: Vec<AttributeEntry>,
    #[serde(default)]
    entry: Vec<CatalogEntry>,
}

pub fn catalog_from_str(text: &str, origin: &Path) -> Result<LayoutCatalog, FormatError> {
    let file: CatalogFile = parse(text, origin)?;
    check_version(file.format_version)?;
    let mut catalog = LayoutCatalog::new(schema_from(&file.attribute)?);
    for (i, e) in file.entry.iter().enumerate() {
        let context = format!("catalog entry {i}");
        let range = TimeRange::new(e.t_start, e.t_end).map_err(model_err(context.clone()))?;
        let blocks = e
            .sub_blocks
            .iter()
            .map(|b| catalog.schema.set_of(b.iter().map(String::as_str)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(model_err(context.clone()))?;
        let layout =
            Layout::new(blocks, e.flavor, &catalog.schema).map_err(|source| FormatError::Layout { context, source })?;
        catalog.insert(range, layout)?;
    }
    Ok(catalog)
}

pub fn catalog_to_string(catalog: &LayoutCatalog) -> Result<String, FormatError> {
    let file = CatalogFile {
        format_version: FORMAT_VERSION,
        attribute: attribute_entries(&catalog.schema),
        entry: catalog
            .entries
            .iter()
            .map(|(r, l)| CatalogEntry {
                t_start: r.start(),
                t_end: r.end(),
                flavor: l.flavor(),
                sub_blocks: l.sub_blocks().iter().map(|&b| names(&catalog.schema, b)).collect(),
            })
            .collect(),
    };
    to_toml(&file)
}

pub fn save_catalog(catalog: &LayoutCatalog, path: &Path) -> Result<(), FormatError> {
    write_file(path, &catalog_to_string(catalog)?)
}

pub fn load_catalog(path: &Path) -> Result<LayoutCatalog, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
    catalog_from_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::heuristic::greedy_nov;
    use crate::model::OptimizerConfig;

    fn here() -> &'static Path {
        Path::new("<test>")
    }

    #[test]
    fn instance_round_trip() {
        let inst = fixture::instance();
        let text = instance_to_string(&inst).unwrap();
        assert!(text.starts_with("format_version = 1"));
        assert_eq!(instance_from_str(&text, here()).unwrap(), inst);

        let mut custom = inst.clone();
        custom.consts = CostConstants::new(8, 4).unwrap();
        let text = instance_to_string(&custom).unwrap();
        assert!(text.contains("[constants]"));
        assert_eq!(instance_from_str(&text, here()).unwrap(), custom);
    }

    #[test]
    fn instance_errors_carry_context() {
        let good = instance_to_string(&fixture::instance()).unwrap();
        let err = instance_from_str(&good.replace("\"a3\"]", "\"zz\"]"), here()).unwrap_err();
        assert!(err.to_string().contains("query 2"), "{err}");
        assert!(err.to_string().contains("zz"), "{err}");

        let err = instance_from_str("format_version = 1\n[block]\nc_e = \"x\"\n", here()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { .. }));
        assert!(err.to_string().contains("line"), "{err}");

        let err = instance_from_str(&good.replace("format_version = 1", "format_version = 2"), here()).unwrap_err();
        assert!(matches!(err, FormatError::Version { found: 2 }));
    }

    #[test]
    fn spec_round_trip_and_partial_files() {
        let spec = WorkloadSpec { n_attributes: 7, seed: 99, ..Default::default() };
        let text = spec_to_string(&spec).unwrap();
        assert_eq!(spec_from_str(&text, here()).unwrap(), spec);
        let partial = spec_from_str("format_version = 1\n[workload]\nalpha = 0.5\n", here()).unwrap();
        assert_eq!(partial, WorkloadSpec { alpha: 0.5, ..Default::default() });
        assert!(spec_from_str("format_version = 1\n[workload]\nbogus = 1\n", here()).is_err());
    }

    #[test]
    fn catalog_round_trips() {
        let inst = fixture::instance();
        let empty = LayoutCatalog::new(inst.schema.clone());
        assert_eq!(catalog_from_str(&catalog_to_string(&empty).unwrap(), here()).unwrap(), empty);

        let mut catalog = LayoutCatalog::new(inst.schema.clone());
        let layout = greedy_nov(&inst, &OptimizerConfig::new(1.0).unwrap());
        catalog.insert(TimeRange::new(0, 100).unwrap(), layout.clone()).unwrap();
        catalog.insert(TimeRange::new(101, 200).unwrap(), crate::heuristic::single_partition(&inst.schema)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("catalog.toml");
        save_catalog(&catalog, &path).unwrap();
        assert_eq!(load_catalog(&path).unwrap(), catalog);
        assert_eq!(catalog.lookup(50), Some(&layout));
        assert_eq!(catalog.lookup(300), None);
    }

    #[test]
    fn catalog_rejects_overlapping_ranges() {
        let inst = fixture::instance();
        let mut catalog = LayoutCatalog::new(inst.schema.clone());
        let single = crate::heuristic::single_partition(&inst.schema);
        catalog.insert(TimeRange::new(0, 100).unwrap(), single.clone()).unwrap();
        let text = catalog_to_string(&catalog).unwrap();
        let entry = &text[text.find("[[entry]]").unwrap()..];
        let doubled =
            format!("{text}\n{}", entry.replace("t_start = 0", "t_start = 100").replace("t_end = 100", "t_end = 150"));
        match catalog_from_str(&doubled, here()) {
            Err(FormatError::OverlappingEntries { first: 0, second: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(catalog.insert(TimeRange::new(100, 120).unwrap(), single).is_err());
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_catalog(Path::new("/nonexistent/catalog.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/catalog.toml"));
    }
}
