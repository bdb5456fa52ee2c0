//! Browser bindings: three text-in, text-out operations for the demo page.

use cikit::format::{
    parse_covariance, parse_graph, parse_relation, parse_triple, write_graph, write_relation,
};
use cikit::{bidirected_graph_of, close, is_closed, undirected_graph_of, GaussianModel, Rule};
use wasm_bindgen::prelude::*;

/// Lists the separations of a graph, or answers a single `A ; B ; S` query
/// when `query` is non-blank.
pub fn separation_text(graph: &str, query: &str) -> Result<String, String> {
    let g = parse_graph(graph).map_err(|e| format!("graph: {e}"))?;
    if query.trim().is_empty() {
        let sep = g.separation_relation();
        return Ok(format!(
            "{} separations\n{}",
            sep.len(),
            write_relation(&sep)
        ));
    }
    let t = parse_triple(g.ground(), query).map_err(|e| format!("query: {e}"))?;
    let verdict = if g.separates_triple(&t) {
        "separated"
    } else {
        "not separated"
    };
    Ok(format!("({}): {verdict}\n", t.display(g.ground())))
}

/// Checks a relation against each rule in `rules`, then closes it under
/// the Horn rules among them.
pub fn check_text(relation: &str, rules: &str) -> Result<String, String> {
    let l = parse_relation(relation).map_err(|e| format!("relation: {e}"))?;
    let rules = Rule::parse_list(rules).map_err(|e| format!("rules: {e}"))?;
    let mut out = String::new();
    for &rule in &rules {
        match is_closed(&l, rule) {
            None => out.push_str(&format!("{rule}: closed\n")),
            Some(v) => out.push_str(&format!("{rule}: violated\n  {}\n", v.display(l.ground()))),
        }
    }
    let horn: Vec<Rule> = rules.into_iter().filter(|r| r.is_horn()).collect();
    let closed = close(&l, &horn).map_err(|e| e.to_string())?;
    out.push_str(&format!(
        "\nclosure ({} triples added)\n",
        closed.len() - l.len()
    ));
    out.push_str(&write_relation(&closed));
    out.push_str("\ndual\n");
    out.push_str(&write_relation(&l.dual()));
    Ok(out)
}

/// Extracts the CI relation of a covariance matrix and of its inverse, and
/// both graphs.
pub fn gaussian_text(covariance: &str, eps: f64) -> Result<String, String> {
    let file = parse_covariance(covariance).map_err(|e| format!("covariance: {e}"))?;
    let m = GaussianModel::from_file(&file, eps).map_err(|e| e.to_string())?;
    let (rel, notes) = m.relation_with_warnings();
    let inv = m.inverse().map_err(|e| e.to_string())?.relation();
    let mut out = String::new();
    for note in notes {
        out.push_str(&format!("warning: {note}\n"));
    }
    out.push_str(&format!(
        "relation of Σ ({} triples)\n{}",
        rel.len(),
        write_relation(&rel)
    ));
    out.push_str(&format!(
        "\nrelation of Σ⁻¹ ({} triples)\n{}",
        inv.len(),
        write_relation(&inv)
    ));
    let verdict = if inv == rel.dual() {
        "equals"
    } else {
        "DIFFERS FROM"
    };
    out.push_str(&format!(
        "\nrelation of Σ⁻¹ {verdict} the dual of the relation of Σ\n"
    ));
    out.push_str(&format!(
        "\nundirected graph\n{}",
        write_graph(&undirected_graph_of(&rel))
    ));
    out.push_str(&format!(
        "\nbidirected graph\n{}",
        write_graph(&bidirected_graph_of(&rel))
    ));
    Ok(out)
}

#[wasm_bindgen]
pub fn separation(graph: &str, query: &str) -> Result<String, JsError> {
    separation_text(graph, query).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check(relation: &str, rules: &str) -> Result<String, JsError> {
    check_text(relation, rules).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn gaussian(covariance: &str, eps: f64) -> Result<String, JsError> {
    gaussian_text(covariance, eps).map_err(|e| JsError::new(&e))
}
