//! Line-oriented text formats for relations, graphs and covariance matrices.
//!
//! Relation:
//!
//! ```text
//! ground: a b c d
//! a ; b ;          # (a,b|∅)
//! a ; b c ; d
//! ```
//!
//! Graph:
//!
//! ```text
//! vertices: a b c d
//! edge: a b
//! ```
//!
//! Covariance:
//!
//! ```text
//! dim: 2
//! labels: a b
//! 1 0.5
//! 0.5 1
//! ```
//!
//! `#` starts a comment and blank lines are ignored in all three. Writers
//! emit canonical order, so parse-then-write is byte-stable.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::relation::Relation;
use crate::triple::Triple;
use crate::vertex::{GroundSet, VertexSet};

/// Non-blank lines with comments stripped, paired with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn header<'a>(line_no: usize, line: &'a str, key: &str) -> Result<&'a str> {
    match line.split_once(':') {
        Some((k, rest)) if k.trim() == key => Ok(rest),
        _ => Err(Error::parse(
            line_no,
            line.split_whitespace().next().unwrap_or(line),
            format!("expected `{key}:` header"),
        )),
    }
}

fn ground_from(line_no: usize, labels: &str) -> Result<Arc<GroundSet>> {
    let labels: Vec<&str> = labels.split_whitespace().collect();
    GroundSet::new(labels.iter().copied())
        .map(GroundSet::shared)
        .map_err(|e| {
            let token = match &e {
                Error::DuplicateLabel(l) | Error::InvalidLabel(l) => l.clone(),
                _ => labels.join(" "),
            };
            Error::parse(line_no, token, e.to_string())
        })
}

fn vertex_set(ground: &GroundSet, line_no: usize, field: &str) -> Result<VertexSet> {
    let mut set = VertexSet::EMPTY;
    for tok in field.split_whitespace() {
        let v = ground
            .index_of(tok)
            .map_err(|_| Error::parse(line_no, tok, "unknown vertex"))?;
        if set.contains(v) {
            return Err(Error::parse(line_no, tok, "vertex repeated within a set"));
        }
        set = set | VertexSet::singleton(v);
    }
    Ok(set)
}

pub fn parse_relation(text: &str) -> Result<Relation> {
    let mut lines = content_lines(text);
    let (n, first) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "", "missing `ground:` header"))?;
    let ground = ground_from(n, header(n, first, "ground")?)?;
    let mut rel = Relation::empty(ground.clone());
    for (n, line) in lines {
        rel.insert(triple_at(&ground, n, line)?)?;
    }
    Ok(rel)
}

fn triple_at(ground: &GroundSet, n: usize, line: &str) -> Result<Triple> {
    let fields: Vec<&str> = line.split(';').collect();
    if fields.len() != 3 {
        return Err(Error::parse(n, line, "expected `A ; B ; C`"));
    }
    let a = vertex_set(ground, n, fields[0])?;
    let b = vertex_set(ground, n, fields[1])?;
    let c = vertex_set(ground, n, fields[2])?;
    Triple::new(a, b, c).map_err(|e| Error::parse(n, line.trim(), e.to_string()))
}

/// Parses a single `A ; B ; C` triple over `ground`; errors report line 1.
pub fn parse_triple(ground: &GroundSet, text: &str) -> Result<Triple> {
    triple_at(ground, 1, text)
}

pub fn write_relation(rel: &Relation) -> String {
    let ground = rel.ground();
    let mut out = format!("ground: {}\n", ground.labels().join(" "));
    for t in rel.iter() {
        let _ = writeln!(out, "{}", t.display(ground));
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (n, first) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "", "missing `vertices:` header"))?;
    let ground = ground_from(n, header(n, first, "vertices")?)?;
    let mut g = Graph::empty(ground.clone());
    for (n, line) in lines {
        let ends: Vec<&str> = header(n, line, "edge")?.split_whitespace().collect();
        if ends.len() != 2 {
            return Err(Error::parse(n, line, "edge needs exactly two endpoints"));
        }
        let u = ground
            .index_of(ends[0])
            .map_err(|_| Error::parse(n, ends[0], "unknown vertex"))?;
        let v = ground
            .index_of(ends[1])
            .map_err(|_| Error::parse(n, ends[1], "unknown vertex"))?;
        g.add_edge(u, v)
            .map_err(|e| Error::parse(n, ends[1], e.to_string()))?;
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let ground = g.ground();
    let mut out = format!("vertices: {}\n", ground.labels().join(" "));
    for (u, v) in g.edges() {
        let _ = writeln!(out, "edge: {} {}", ground.label(u), ground.label(v));
    }
    out
}

/// Parsed covariance file: labels and a square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceFile {
    pub ground: Arc<GroundSet>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_covariance(text: &str) -> Result<CovarianceFile> {
    let mut lines = content_lines(text);
    let (n, first) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "", "missing `dim:` header"))?;
    let dim_tok = header(n, first, "dim")?.trim();
    let dim: usize = dim_tok
        .parse()
        .map_err(|_| Error::parse(n, dim_tok, "dimension must be a positive integer"))?;
    let (n, second) = lines
        .next()
        .ok_or_else(|| Error::parse(n, "", "missing `labels:` header"))?;
    let ground = ground_from(n, header(n, second, "labels")?)?;
    if ground.len() != dim {
        return Err(Error::parse(
            n,
            second,
            format!("expected {dim} labels, got {}", ground.len()),
        ));
    }
    let mut rows = Vec::with_capacity(dim);
    let mut last = n;
    for (n, line) in lines {
        last = n;
        if rows.len() == dim {
            return Err(Error::parse(n, line, "more rows than `dim`"));
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(n, tok, "not a finite decimal number"))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != dim {
            return Err(Error::parse(
                n,
                line,
                format!("expected {dim} entries, got {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != dim {
        return Err(Error::parse(
            last,
            "",
            format!("expected {dim} rows, got {}", rows.len()),
        ));
    }
    Ok(CovarianceFile { ground, rows })
}

pub fn write_covariance(ground: &GroundSet, rows: &[Vec<f64>]) -> String {
    let mut out = format!(
        "dim: {}\nlabels: {}\n",
        ground.len(),
        ground.labels().join(" ")
    );
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
