//! LP-file export of [`IlpModel`]s and decoding of solver assignments.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use super::ilp::{x_name, IlpModel, Relation};
use crate::model::{AttrSet, Layout, LayoutError, Schema};

/// Terms per output line; keeps lines well under common LP reader limits.
const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IlpError {
    #[error("line {line}: expected `name value`, got `{text}`")]
    MalformedSolution { line: usize, text: String },
    #[error("assignment has no value for variable `{0}`")]
    MissingVariable(String),
    #[error("variable `{name}` has non-binary value {value}")]
    NonBinary { name: String, value: f64 },
    #[error("assignment violates constraint {name}: {lhs} {relation} {rhs}")]
    Violated { name: String, lhs: f64, relation: Relation, rhs: f64 },
    #[error("decoded layout is invalid: {0}")]
    Layout(#[from] LayoutError),
}

fn coefficient(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{c:.0}")
    } else {
        format!("{c}")
    }
}

/// Writes `c1 v1 + c2 v2 - ...`, wrapping long expressions.
fn write_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    for (i, (c, name)) in terms.enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        if i > 0 || c < 0.0 {
            let _ = write!(out, " {sign} ");
        } else {
            out.push(' ');
        }
        if c.abs() == 1.0 {
            out.push_str(&name);
        } else {
            let _ = write!(out, "{} {name}", coefficient(c.abs()));
        }
    }
}

/// Renders the model in LP file format (Minimize / Subject To / Bounds /
/// Binaries / End). Output depends only on the model.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ railway layout ({}), {} attributes, {} queries",
        model.flavor,
        model.attributes(),
        model.query_ids().len()
    );
    out.push_str("Minimize\n obj:");
    let vars = model.variables();
    let mut objective = vars.iter().filter(|v| v.objective != 0.0).map(|v| (v.objective, v.name.clone())).peekable();
    if objective.peek().is_none() {
        if let Some(first) = vars.first() {
            let _ = write!(out, " 0 {}", first.name);
        }
    } else {
        write_terms(&mut out, objective);
    }
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, c.terms.iter().map(|&(v, coef)| (coef, vars[v].name.clone())));
        let _ = writeln!(out, " {} {}", c.relation, coefficient(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in vars {
        let _ = writeln!(out, " 0 <= {} <= 1", v.name);
    }
    out.push_str("Binaries\n");
    for chunk in vars.chunks(TERMS_PER_LINE) {
        let names: Vec<&str> = chunk.iter().map(|v| v.name.as_str()).collect();
        let _ = writeln!(out, " {}", names.join(" "));
    }
    out.push_str("End\n");
    out
}

/// Parses whitespace-separated `name value` lines. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_solution(text: &str) -> Result<BTreeMap<String, f64>, IlpError> {
    let mut values = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = || IlpError::MalformedSolution { line: i + 1, text: line.to_string() };
        let mut fields = trimmed.split_whitespace();
        let (Some(name), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed());
        };
        let value: f64 = value.parse().map_err(|_| malformed())?;
        values.insert(name.to_string(), value);
    }
    Ok(values)
}

/// Checks a 0/1 assignment against every constraint and decodes the layout
/// it describes: partition `p` holds `{a : x_a_p = 1}`, empty partitions
/// are dropped and repeated partitions collapse.
pub fn import_assignment(
    model: &IlpModel,
    assignment: &BTreeMap<String, f64>,
    schema: &Schema,
) -> Result<Layout, IlpError> {
    const TOLERANCE: f64 = 1e-6;
    let mut values = Vec::with_capacity(model.variables().len());
    for v in model.variables() {
        let value = *assignment.get(&v.name).ok_or_else(|| IlpError::MissingVariable(v.name.clone()))?;
        let rounded = value.round();
        if (value - rounded).abs() > TOLERANCE || !(rounded == 0.0 || rounded == 1.0) {
            return Err(IlpError::NonBinary { name: v.name.clone(), value });
        }
        values.push(rounded);
    }
    for c in model.constraints() {
        let lhs = model.lhs(c, &values);
        if !c.relation.holds(lhs, c.rhs, TOLERANCE) {
            return Err(IlpError::Violated { name: c.name.clone(), lhs, relation: c.relation, rhs: c.rhs });
        }
    }
    let k = model.partitions();
    let mut blocks: Vec<AttrSet> = Vec::new();
    for p in 0..k {
        let block: AttrSet = (0..model.attributes())
            .filter(|&a| model.variable(&x_name(a, p)).is_some_and(|v| values[v] == 1.0))
            .collect();
        if !block.is_empty() && !blocks.contains(&block) {
            blocks.push(block);
        }
    }
    Ok(Layout::new(blocks, model.flavor, schema)?)
}
