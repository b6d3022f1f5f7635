//! Host-graph and terminal-pair arguments for the percolation command.
//!
//! Graphs are named `gridRxC`, `cycleN`, `pathN`, `completeN`, or
//! `file:<path>` where the file's first line is the vertex count and each
//! further line is an edge `u v`. Vertices are 1-based in every external
//! format and 0-based in the core API.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use disocc_core::percolation::{Graph, TerminalPairs};

pub fn parse_graph(spec: &str) -> Result<Graph> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(Path::new(path)).with_context(|| format!("reading graph file {path}"))?;
        return parse_graph_file(&text).with_context(|| format!("graph file {path}"));
    }
    let number = |s: &str| -> Result<usize> { s.parse().map_err(|_| anyhow!("invalid graph `{spec}`")) };
    if let Some(dims) = spec.strip_prefix("grid") {
        let (r, c) = dims.split_once('x').ok_or_else(|| anyhow!("invalid grid `{spec}`; expected gridRxC"))?;
        return Ok(Graph::grid(number(r)?, number(c)?));
    }
    if let Some(n) = spec.strip_prefix("cycle") {
        return Ok(Graph::cycle(number(n)?));
    }
    if let Some(n) = spec.strip_prefix("path") {
        return Ok(Graph::path(number(n)?));
    }
    if let Some(n) = spec.strip_prefix("complete") {
        return Ok(Graph::complete(number(n)?));
    }
    bail!("unknown graph `{spec}`; expected gridRxC, cycleN, pathN, completeN or file:<path>")
}

pub fn parse_graph_file(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, first) = lines.next().ok_or_else(|| anyhow!("empty graph file"))?;
    let n: usize = first.parse().map_err(|_| anyhow!("line {line}: expected the vertex count"))?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let mut parts = l.split_whitespace();
        let mut vertex = || -> Result<usize> {
            let v: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| anyhow!("line {line}: expected an edge `u v`"))?;
            if v == 0 || v > n {
                bail!("line {line}: vertex {v} outside 1..={n}");
            }
            Ok(v - 1)
        };
        let (u, v) = (vertex()?, vertex()?);
        if parts.next().is_some() {
            bail!("line {line}: expected exactly two vertices");
        }
        edges.push((u, v));
    }
    Graph::new(n, edges).map_err(|e| anyhow!("{e}"))
}

/// Parses `"1-9,3-7"` into validated 0-based terminal pairs.
pub fn parse_pairs(graph: &Graph, text: &str) -> Result<TerminalPairs> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, y) = item.split_once('-').ok_or_else(|| anyhow!("invalid pair `{item}`; expected x-y"))?;
        let vertex = |s: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => bail!("invalid vertex `{s}` in pair `{item}` (vertices are 1-based)"),
            }
        };
        pairs.push((vertex(x)?, vertex(y)?));
    }
    TerminalPairs::new(graph, pairs).map_err(|e| anyhow!("{e}"))
}
