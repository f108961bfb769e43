use std::io::{BufRead, Write};

use super::{Graph, IdRemap};
use crate::error::{Error, Result};

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` are comments and blank lines are skipped. Every
/// other line must hold exactly two non-negative integer ids. Ids are remapped
/// densely in first-appearance order; self-loops and duplicate edges (in
/// either orientation) are dropped.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Graph, IdRemap)> {
    let mut remap = IdRemap::new();
    let mut edges = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(edge) = parse_line(&line, index + 1)? {
            let u = remap.intern(edge.0);
            let v = remap.intern(edge.1);
            edges.push((u, v));
        }
    }
    let graph = Graph::from_edges(remap.len(), edges)?;
    Ok((graph, remap))
}

/// [`load_edge_list`] over raw bytes. Invalid UTF-8 is reported as a parse
/// error on the offending line.
pub fn parse_edge_list(data: &[u8]) -> Result<(Graph, IdRemap)> {
    let mut remap = IdRemap::new();
    let mut edges = Vec::new();
    for (index, raw) in data.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw)
            .map_err(|_| Error::parse(index + 1, "line is not valid UTF-8"))?;
        if let Some(edge) = parse_line(line, index + 1)? {
            let u = remap.intern(edge.0);
            let v = remap.intern(edge.1);
            edges.push((u, v));
        }
    }
    let graph = Graph::from_edges(remap.len(), edges)?;
    Ok((graph, remap))
}

fn parse_line(line: &str, line_no: usize) -> Result<Option<(u64, u64)>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut tokens = trimmed.split_whitespace();
    let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
        return Err(Error::parse(
            line_no,
            format!("expected two vertex ids, found `{trimmed}`"),
        ));
    };
    let id = |token: &str| {
        token
            .parse::<u64>()
            .map_err(|_| Error::parse(line_no, format!("`{token}` is not a non-negative integer id")))
    };
    Ok(Some((id(a)?, id(b)?)))
}

/// Writes `g` as an edge list: a `# n=<n> m=<m>` header followed by one
/// `u v` line per edge with `u < v`.
pub fn dump_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# n={} m={}", g.n(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}
