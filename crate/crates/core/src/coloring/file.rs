//! Coloring output files.
//!
//! ```text
//! # <n> <C> <algorithm> <epsilon> <seed>
//! <original_id> <color>
//! ...
//! ```

use std::io::{BufRead, Write};

use super::Coloring;
use crate::error::{Error, Result};
use crate::graph::IdRemap;

#[derive(Clone, Debug, PartialEq)]
pub struct ColoringHeader {
    pub n: usize,
    pub palette: usize,
    pub algorithm: String,
    pub epsilon: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColoringFile {
    pub header: ColoringHeader,
    /// `(original_id, color)` in file order.
    pub entries: Vec<(u64, usize)>,
}

impl ColoringFile {
    /// Maps entries back onto dense ids. Every vertex of `remap` must appear
    /// exactly once. Colors are not range-checked here; see
    /// [`verify_coloring`](crate::metrics::verify_coloring).
    pub fn to_coloring(&self, remap: &IdRemap) -> Result<Coloring> {
        if self.entries.len() != remap.len() || self.header.n != remap.len() {
            return Err(Error::param(format!(
                "coloring lists {} vertices (header says {}), graph has {}",
                self.entries.len(),
                self.header.n,
                remap.len()
            )));
        }
        let mut colors = vec![None; remap.len()];
        for &(id, color) in &self.entries {
            let v = remap
                .dense(id)
                .ok_or_else(|| Error::param(format!("vertex id {id} is not in the graph")))?;
            if colors[v].replace(color).is_some() {
                return Err(Error::param(format!("vertex id {id} is colored twice")));
            }
        }
        let colors = colors.into_iter().map(|c| c.expect("all slots filled")).collect();
        Ok(Coloring::from_raw(colors, self.header.palette))
    }
}

pub fn write_coloring<W: Write>(
    mut out: W,
    header: &ColoringHeader,
    coloring: &Coloring,
    remap: &IdRemap,
) -> Result<()> {
    if header.algorithm.is_empty() || header.algorithm.contains(char::is_whitespace) {
        return Err(Error::param("algorithm name must be a single non-empty token"));
    }
    writeln!(
        out,
        "# {} {} {} {} {}",
        header.n, header.palette, header.algorithm, header.epsilon, header.seed
    )?;
    for (v, &color) in coloring.colors().iter().enumerate() {
        let id = remap
            .original(v)
            .ok_or_else(|| Error::param(format!("no original id for vertex {v}")))?;
        writeln!(out, "{id} {color}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_coloring<R: BufRead>(reader: R) -> Result<ColoringFile> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::parse(1, "missing coloring header"));
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        break parse_header(&line, i + 1)?;
    };
    let mut entries = Vec::with_capacity(header.n.min(1 << 20));
    for (i, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(id), Some(color), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::parse(i + 1, format!("expected `<id> <color>`, found `{trimmed}`")));
        };
        let id = id
            .parse::<u64>()
            .map_err(|_| Error::parse(i + 1, format!("bad vertex id `{id}`")))?;
        let color = color
            .parse::<usize>()
            .map_err(|_| Error::parse(i + 1, format!("bad color `{color}`")))?;
        entries.push((id, color));
    }
    Ok(ColoringFile { header, entries })
}

fn parse_header(line: &str, line_no: usize) -> Result<ColoringHeader> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(line_no, "header must start with `#`"))?;
    let tokens: Vec<&str> = body.split_whitespace().collect();
    let [n, palette, algorithm, epsilon, seed] = tokens[..] else {
        return Err(Error::parse(line_no, "header must be `# n C algorithm epsilon seed`"));
    };
    let bad = |what: &str, token: &str| Error::parse(line_no, format!("bad {what} `{token}`"));
    Ok(ColoringHeader {
        n: n.parse().map_err(|_| bad("vertex count", n))?,
        palette: palette.parse().map_err(|_| bad("palette size", palette))?,
        algorithm: algorithm.to_string(),
        epsilon: epsilon.parse().map_err(|_| bad("epsilon", epsilon))?,
        seed: seed.parse().map_err(|_| bad("seed", seed))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    #[test]
    fn writes_original_ids_and_reads_back() {
        let (g, remap) = load_edge_list("10 20\n20 30\n".as_bytes()).unwrap();
        let coloring = Coloring::new(vec![1, 0, 1], 2).unwrap();
        let header = ColoringHeader {
            n: g.n(),
            palette: 2,
            algorithm: "unctr".into(),
            epsilon: 0.5,
            seed: 42,
        };
        let mut buf = Vec::new();
        write_coloring(&mut buf, &header, &coloring, &remap).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "# 3 2 unctr 0.5 42\n10 1\n20 0\n30 1\n");
        let parsed = read_coloring(&buf[..]).unwrap();
        assert_eq!(parsed.header, header);
        assert_eq!(parsed.to_coloring(&remap).unwrap(), coloring);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_coloring("".as_bytes()).is_err());
        assert!(read_coloring("3 2 unctr 1 0\n".as_bytes()).is_err());
        assert!(read_coloring("# 3 2 unctr one 0\n".as_bytes()).is_err());
        assert!(matches!(
            read_coloring("# 1 2 greedy 1 0\n5 x\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn mapping_checks_coverage() {
        let remap = IdRemap::identity(2);
        let file = read_coloring("# 2 2 crsv 1 0\n0 1\n0 0\n".as_bytes()).unwrap();
        assert!(file.to_coloring(&remap).is_err());
        let file = read_coloring("# 2 2 crsv 1 0\n0 1\n7 0\n".as_bytes()).unwrap();
        assert!(file.to_coloring(&remap).is_err());
        let file = read_coloring("# 2 2 crsv 1 0\n0 1\n".as_bytes()).unwrap();
        assert!(file.to_coloring(&remap).is_err());
    }
}
