//! The `RRG1` text format:
//!
//! ```text
//! RRG1 <d> <n> <m>
//! <u> <v>        (m lines, u < v, lexicographically sorted)
//! ```

use std::io::{BufRead, Write};

use super::RegularGraph;
use crate::error::{Error, Result};

pub fn write_rrg1<W: Write>(g: &RegularGraph, mut out: W) -> Result<()> {
    let edges = g.edges();
    writeln!(out, "RRG1 {} {} {}", g.d(), g.n(), edges.len())?;
    for (u, v) in edges {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_rrg1<R: BufRead>(input: R) -> Result<RegularGraph> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty RRG1 input".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "RRG1" {
        return Err(Error::Parse(format!("bad RRG1 header: {header:?}")));
    }
    let num = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))) };
    let (d, n, m) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("bad edge line: {line:?}")));
        };
        edges.push((num(u)?, num(v)?));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header declares {m} edges, found {}",
            edges.len()
        )));
    }
    RegularGraph::from_edges(d, n, &edges)
}
