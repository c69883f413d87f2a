//! Plain-text graph format.
//!
//! ```text
//! # comments run to end of line
//! p 4
//! 0 -> 3
//! 1 -> 2
//! 1 -> 3
//! 3 -- 2
//! ```
//!
//! The first non-blank line must be the header `p <vertex-count>`. Every
//! following line holds one edge `<u> -> <v>` or `<u> -- <v>`, endpoints
//! separated from the arrow by whitespace. Endpoints are vertex indices in
//! `[0, p)`, or labels when a labels list is supplied to [`parse_graph`]. A
//! labels file lists one label per line, line `i` naming vertex `i`.

use std::fmt::Write as _;

use super::{Edge, GraphError, MixedGraph, VertexId};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn resolve(
    token: &str,
    p: usize,
    labels: Option<&[String]>,
    line: usize,
) -> Result<VertexId, GraphError> {
    if let Some(labels) = labels {
        if let Some(i) = labels.iter().position(|l| l == token) {
            return Ok(VertexId(i));
        }
    }
    match token.parse::<usize>() {
        Ok(i) if i < p => Ok(VertexId(i)),
        Ok(i) => Err(err(line, format!("vertex {i} out of range (p = {p})"))),
        Err(_) => Err(err(line, format!("unknown vertex {token:?}"))),
    }
}

/// Parses the text format. Duplicate or conflicting edges are rejected with
/// the offending line number.
pub fn parse_graph(text: &str, labels: Option<&[String]>) -> Result<MixedGraph, GraphError> {
    let mut graph: Option<MixedGraph> = None;
    let mut first_seen: Vec<Option<usize>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some(g) = graph.as_mut() else {
            match tokens.as_slice() {
                ["p", n] => {
                    let p: usize = n
                        .parse()
                        .map_err(|_| err(line_no, format!("bad vertex count {n:?}")))?;
                    let mut g = MixedGraph::new(p);
                    if let Some(l) = labels {
                        g = g.with_labels(l.iter().cloned()).map_err(|e| err(line_no, e.to_string()))?;
                    }
                    first_seen = vec![None; p * p];
                    graph = Some(g);
                    continue;
                }
                _ => return Err(err(line_no, "expected header `p <vertex-count>`")),
            }
        };
        let [a, arrow, b] = tokens.as_slice() else {
            return Err(err(line_no, "expected `<u> -> <v>` or `<u> -- <v>`"));
        };
        let p = g.p();
        let u = resolve(a, p, labels, line_no)?;
        let v = resolve(b, p, labels, line_no)?;
        let edge = match *arrow {
            "->" => Edge::Directed(u, v),
            "--" => Edge::Undirected(u, v),
            other => return Err(err(line_no, format!("unknown edge type {other:?}"))),
        };
        if u != v {
            let key = u.0.min(v.0) * p + u.0.max(v.0);
            if let Some(prev) = first_seen[key] {
                return Err(err(
                    line_no,
                    format!("edge between {a} and {b} conflicts with line {prev}"),
                ));
            }
            first_seen[key] = Some(line_no);
        }
        g.add_edge(edge).map_err(|e| err(line_no, e.to_string()))?;
    }
    graph.ok_or_else(|| err(0, "missing header `p <vertex-count>`"))
}

/// Writes the text format with numeric endpoints, edges in ascending order.
pub fn write_graph(g: &MixedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p {}", g.p()).unwrap();
    for e in g.edges() {
        match e {
            Edge::Directed(u, v) => writeln!(out, "{u} -> {v}").unwrap(),
            Edge::Undirected(u, v) => writeln!(out, "{u} -- {v}").unwrap(),
        }
    }
    out
}

pub fn parse_labels(text: &str) -> Vec<String> {
    text.lines()
        .map(strip_comment)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn write_labels(g: &MixedGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        writeln!(out, "{}", g.label(v)).unwrap();
    }
    out
}
