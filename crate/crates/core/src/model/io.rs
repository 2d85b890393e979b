//! Plain-text model parameter files.
//!
//! ```text
//! N M
//! b <unit> <value>        one line per unit, 0..N+M
//! W <visible> <hidden> <value>
//! ```
//!
//! Unit indices are global (hidden units are `N..N+M`). Values are written
//! in shortest round-trip decimal form, so reading back is lossless.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, Edge, ModelParameters, Rbm};

pub fn write_model(rbm: &Rbm) -> String {
    let g = &rbm.graph;
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.num_visible(), g.num_hidden());
    for (i, b) in rbm.params.biases.iter().enumerate() {
        let _ = writeln!(out, "b {i} {b:?}");
    }
    for (k, w) in rbm.params.weights.iter().enumerate() {
        let (v, h) = g.endpoints(k);
        let _ = writeln!(out, "W {v} {h} {w:?}");
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from {tok:?}")))
}

pub fn read_model(text: &str) -> Result<Rbm> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty model file"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(toks.next(), hl, "N")?;
    let m: usize = field(toks.next(), hl, "M")?;
    let mut biases = vec![None; n + m];
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("b") => {
                let i: usize = field(toks.next(), ln, "unit index")?;
                let value: f64 = field(toks.next(), ln, "bias")?;
                let slot = biases
                    .get_mut(i)
                    .ok_or_else(|| parse_err(ln, format!("unit {i} out of range")))?;
                *slot = Some(value);
            }
            Some("W") => {
                let v: usize = field(toks.next(), ln, "visible index")?;
                let h: usize = field(toks.next(), ln, "hidden index")?;
                let value: f64 = field(toks.next(), ln, "weight")?;
                if v >= n || h < n || h >= n + m {
                    return Err(parse_err(ln, format!("edge {v} {h} does not join the layers")));
                }
                edges.push(Edge {
                    visible: v,
                    hidden: h - n,
                });
                weights.push(value);
            }
            other => return Err(parse_err(ln, format!("unknown record {other:?}"))),
        }
    }
    let biases = biases
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(0, format!("missing bias for unit {i}"))))
        .collect::<Result<Vec<_>>>()?;
    let graph = BipartiteGraph::new(n, m, edges)?;
    Rbm::new(Arc::new(graph), ModelParameters { weights, biases })
}
