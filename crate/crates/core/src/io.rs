//! Plain-text file formats. Vertices are numbered from 1 in every file and
//! from 0 in memory. Blank lines and lines starting with `#` are ignored.
//!
//! * measurements: `n m` (or just `n`), then `i j d` lines
//! * configuration: `space n`, then `i x` lines
//! * edge list: `n m`, then `i j` lines
//! * embedding: `i x` lines
//! * clique certificate: `PRUNED` / `IS` / `BSETS` / `CLIQUE` sections

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::clique::CliqueCertificate;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measurement::MeasurementSet;
use crate::numeric::Scalar;
use crate::space::{PointConfig, Space};

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(k, l)| (k, l.split_whitespace().collect()))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

fn vertex(tok: &str, n: usize, line: usize) -> Result<usize> {
    let v: usize = field(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(parse_err(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

fn scalar(tok: &str, line: usize) -> Result<Scalar> {
    tok.parse().map_err(|e: Error| e.at_line(line))
}

fn arity(toks: &[&str], expected: usize, line: usize, shape: &str) -> Result<()> {
    if toks.len() != expected {
        return Err(parse_err(line, format!("expected `{shape}`, found {} fields", toks.len())));
    }
    Ok(())
}

/// Reads the `n [m]` header; returns `(n, m, header_line)`.
fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    allow_short: bool,
) -> Result<(usize, Option<usize>, usize)> {
    let (line, toks) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    match toks.as_slice() {
        [n] if allow_short => Ok((field(n, line, "vertex count")?, None, line)),
        [n, m] => Ok((field(n, line, "vertex count")?, Some(field(m, line, "line count")?), line)),
        _ => Err(parse_err(line, "expected header `n m`")),
    }
}

fn check_count(expected: Option<usize>, got: usize, line: usize) -> Result<()> {
    match expected {
        Some(m) if m != got => Err(parse_err(line, format!("header announces {m} entries, found {got}"))),
        _ => Ok(()),
    }
}

pub fn parse_measurements(text: &str) -> Result<MeasurementSet> {
    let mut lines = content_lines(text);
    let (n, m, head) = header(&mut lines, true)?;
    let mut set = MeasurementSet::new(n);
    let mut count = 0;
    for (line, toks) in lines {
        arity(&toks, 3, line, "i j d")?;
        let (i, j) = (vertex(toks[0], n, line)?, vertex(toks[1], n, line)?);
        if i == j {
            return Err(parse_err(line, "a pair needs two distinct vertices"));
        }
        if set.contains(i, j) {
            return Err(parse_err(line, format!("pair {} {} listed twice", i + 1, j + 1)));
        }
        set.insert(i, j, scalar(toks[2], line)?).map_err(|e| e.at_line(line))?;
        count += 1;
    }
    check_count(m, count, head)?;
    Ok(set)
}

pub fn write_measurements(m: &MeasurementSet) -> String {
    let mut out = format!("{} {}\n", m.n(), m.len());
    for (i, j, d) in m.iter() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, d);
    }
    out
}

pub fn parse_config(text: &str) -> Result<PointConfig> {
    let mut lines = content_lines(text);
    let (head, toks) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    arity(&toks, 2, head, "space n")?;
    let space: Space = toks[0].parse().map_err(|e: Error| e.at_line(head))?;
    let n: usize = field(toks[1], head, "point count")?;
    let mut positions: Vec<Option<Scalar>> = vec![None; n];
    for (line, toks) in lines {
        arity(&toks, 2, line, "i x")?;
        let i = vertex(toks[0], n, line)?;
        if positions[i].is_some() {
            return Err(parse_err(line, format!("point {} listed twice", i + 1)));
        }
        positions[i] = Some(scalar(toks[1], line)?);
    }
    let positions = positions
        .into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| parse_err(head, format!("point {} has no position", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    PointConfig::new(space, positions).map_err(|e| e.at_line(head))
}

pub fn write_config(cfg: &PointConfig) -> String {
    let mut out = format!("{} {}\n", cfg.space(), cfg.len());
    for (i, x) in cfg.positions().iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, x);
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (n, m, head) = header(&mut lines, false)?;
    let mut edges = Vec::new();
    for (line, toks) in lines {
        arity(&toks, 2, line, "i j")?;
        let (i, j) = (vertex(toks[0], n, line)?, vertex(toks[1], n, line)?);
        if i == j {
            return Err(parse_err(line, "self-loop"));
        }
        edges.push((i, j));
    }
    check_count(m, edges.len(), head)?;
    let g = Graph::from_edges(n, edges).map_err(|e| e.at_line(head))?;
    if g.edge_count() != m.unwrap_or(0) {
        return Err(parse_err(head, "edge list contains repeated edges"));
    }
    Ok(g)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

pub fn parse_embedding(text: &str) -> Result<Vec<Scalar>> {
    let mut entries = BTreeMap::new();
    for (line, toks) in content_lines(text) {
        arity(&toks, 2, line, "i x")?;
        let i: usize = field(toks[0], line, "vertex")?;
        if i == 0 {
            return Err(parse_err(line, "vertices are numbered from 1"));
        }
        if entries.insert(i, scalar(toks[1], line)?).is_some() {
            return Err(parse_err(line, format!("vertex {i} listed twice")));
        }
    }
    if entries.keys().copied().ne(1..=entries.len()) {
        return Err(parse_err(1, "embedding must list vertices 1..n exactly once"));
    }
    Ok(entries.into_values().collect())
}

pub fn write_embedding(emb: &[Scalar]) -> String {
    let mut out = String::new();
    for (i, x) in emb.iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, x);
    }
    out
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_certificate(c: &CliqueCertificate) -> String {
    let mut out = format!("k {}\n", c.k);
    let _ = writeln!(out, "PRUNED {} {}", c.pruned_vertices.len(), c.pruned_min_degree);
    let _ = writeln!(out, "{}", join(&c.pruned_vertices));
    let _ = writeln!(out, "IS {}", c.independent_set.len());
    let _ = writeln!(out, "{}", join(&c.independent_set));
    let _ = writeln!(out, "BSETS {}", c.b_sets.len());
    for (s, b) in &c.b_sets {
        let _ = writeln!(out, "{}: {}", s + 1, join(b));
    }
    let _ = writeln!(out, "CLIQUE {}", c.clique.len());
    let _ = writeln!(out, "{}", join(&c.clique));
    out
}

/// Reads a certificate written by [`write_certificate`].
pub fn parse_certificate(text: &str) -> Result<CliqueCertificate> {
    // empty vertex lists leave blank lines, so keep them here
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim_end())).collect();
    let mut it = lines.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| parse_err(0, format!("missing {what}")));
    let list = |(line, l): (usize, &str)| -> Result<Vec<usize>> {
        l.split_whitespace().map(|t| field::<usize>(t, line, "vertex").map(|v| v.wrapping_sub(1))).collect()
    };
    let tagged = |(line, l): (usize, &str), tag: &str| -> Result<Vec<usize>> {
        let mut toks = l.split_whitespace();
        if toks.next() != Some(tag) {
            return Err(parse_err(line, format!("expected section {tag}")));
        }
        toks.map(|t| field(t, line, "count")).collect()
    };
    let k = tagged(next("k")?, "k")?;
    let pruned_head = tagged(next("PRUNED")?, "PRUNED")?;
    let pruned_vertices = list(next("pruned vertices")?)?;
    let is_head = tagged(next("IS")?, "IS")?;
    let independent_set = list(next("independent set")?)?;
    let b_head = tagged(next("BSETS")?, "BSETS")?;
    let (&[k], &[_, pruned_min_degree], &[_], &[b_count]) =
        (k.as_slice(), pruned_head.as_slice(), is_head.as_slice(), b_head.as_slice())
    else {
        return Err(parse_err(0, "malformed section headers"));
    };
    let mut b_sets = BTreeMap::new();
    for _ in 0..b_count {
        let (line, l) = next("B set")?;
        let (s, rest) = l.split_once(':').ok_or_else(|| parse_err(line, "expected `s: members`"))?;
        let s: usize = field(s.trim(), line, "vertex")?;
        b_sets.insert(s.wrapping_sub(1), list((line, rest))?);
    }
    tagged(next("CLIQUE")?, "CLIQUE")?;
    let clique = list(next("clique")?)?;
    Ok(CliqueCertificate { k, pruned_vertices, pruned_min_degree, independent_set, b_sets, clique })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::extract_clique;

    #[test]
    fn measurement_round_trip() {
        let text = "3 2\n# comment\n1 2 0.5\n\n3 2 7/3\n";
        let m = parse_measurements(text).unwrap();
        assert_eq!(m.get(0, 1), Some(&Scalar::half()));
        assert_eq!(m.get(1, 2), Some(&Scalar::ratio(7, 3)));
        assert_eq!(parse_measurements(&write_measurements(&m)).unwrap(), m);
        // header without a count
        assert_eq!(parse_measurements("3\n1 2 1/2\n2 3 7/3\n").unwrap(), m);
    }

    #[test]
    fn measurement_errors_carry_line_numbers() {
        let cases = [
            ("3 1\n1 4 1\n", 2),
            ("3 1\n1 2 x\n", 2),
            ("3 2\n1 2 1\n2 1 1\n", 3),
            ("3 2\n1 2 1\n", 1),
            ("3 1\n1 2\n", 2),
            ("", 1),
        ];
        for (text, line) in cases {
            match parse_measurements(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn config_round_trip() {
        let cfg = PointConfig::circle(vec![Scalar::ratio(1, 8), Scalar::zero(), Scalar::ratio(2, 3)]).unwrap();
        let text = write_config(&cfg);
        assert!(text.starts_with("circle 3\n"));
        assert_eq!(parse_config(&text).unwrap(), cfg);
        assert!(parse_config("line 2\n1 0\n2 0\n").is_err());
        assert!(parse_config("line 2\n1 0\n").is_err());
        assert!(parse_config("plane 1\n1 0\n").is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::cycle(5);
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
        assert!(parse_edge_list("3 2\n1 2\n2 1\n").is_err());
        assert!(parse_edge_list("3 1\n1 1\n").is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let emb = vec![Scalar::zero(), Scalar::ratio(-5, 2), Scalar::ratio(1, 3)];
        assert_eq!(parse_embedding(&write_embedding(&emb)).unwrap(), emb);
        assert!(parse_embedding("1 0\n3 1\n").is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let g = Graph::complete(4).disjoint_union(&Graph::path(3));
        let cert = extract_clique(&g, 1, 3);
        assert_eq!(parse_certificate(&write_certificate(&cert)).unwrap(), cert);
        let empty = extract_clique(&Graph::empty(3), 0, 0);
        assert_eq!(parse_certificate(&write_certificate(&empty)).unwrap(), empty);
    }
}
