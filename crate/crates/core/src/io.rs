//! Plain-text edge lists.
//!
//! ```text
//! # digraph n=<N>
//! u v
//! ```
//!
//! ```text
//! # bipartite n=<N> m=<M>
//! A i k      actor i demands attribute k
//! S k i      attribute k is supplied by actor i
//! ```
//!
//! Ids are zero-based. The header must be the first non-blank line; any other
//! line starting with `#` is a comment. Writers emit lines in sorted order
//! (all `A` lines, then all `S` lines).

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::generator::BipartiteDigraph;
use crate::projection::Digraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFile {
    Digraph(Digraph),
    Bipartite(BipartiteDigraph),
}

pub fn write_digraph(d: &Digraph) -> String {
    let mut out = format!("# digraph n={}\n", d.n());
    for (u, v) in d.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_bipartite(h: &BipartiteDigraph) -> String {
    let mut out = format!("# bipartite n={} m={}\n", h.n(), h.m());
    for (i, k) in h.demand_links() {
        writeln!(out, "A {i} {k}").unwrap();
    }
    for (k, i) in h.supply_links() {
        writeln!(out, "S {k} {i}").unwrap();
    }
    out
}

enum Header {
    Digraph { n: usize },
    Bipartite { n: usize, m: usize },
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, ParseError> {
    let body = line.trim_start_matches('#').trim();
    let mut parts = body.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let mut n = None;
    let mut m = None;
    for field in parts {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("malformed header field `{field}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| err(line_no, format!("header value `{value}` is not a count")))?;
        match key {
            "n" if n.is_none() => n = Some(value),
            "m" if m.is_none() => m = Some(value),
            _ => return Err(err(line_no, format!("unexpected header field `{field}`"))),
        }
    }
    match (kind, n, m) {
        ("digraph", Some(n), None) => Ok(Header::Digraph { n }),
        ("bipartite", Some(n), Some(m)) => Ok(Header::Bipartite { n, m }),
        _ => Err(err(
            line_no,
            "expected header `# digraph n=<N>` or `# bipartite n=<N> m=<M>`",
        )),
    }
}

fn parse_id(line_no: usize, token: Option<&str>, bound: usize, what: &str) -> Result<usize, ParseError> {
    let token = token.ok_or_else(|| err(line_no, format!("missing {what} id")))?;
    let id: usize = token
        .parse()
        .map_err(|_| err(line_no, format!("{what} id `{token}` is not a non-negative integer")))?;
    if id >= bound {
        return Err(err(line_no, format!("{what} id {id} out of range (< {bound})")));
    }
    Ok(id)
}

/// Parses either file kind, detected from the header.
pub fn parse_graph(text: &str) -> Result<GraphFile, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (header_line, header) = loop {
        match lines.next() {
            None => return Err(err(1, "missing header")),
            Some((_, "")) => continue,
            Some((no, l)) if l.starts_with('#') => break (no, parse_header(no, l)?),
            Some((no, _)) => return Err(err(no, "missing header")),
        }
    };
    let _ = header_line;
    let body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match header {
        Header::Digraph { n } => {
            let mut seen = HashSet::new();
            let mut edges = Vec::new();
            for (no, line) in body {
                let mut tokens = line.split_whitespace();
                let u = parse_id(no, tokens.next(), n, "source")?;
                let v = parse_id(no, tokens.next(), n, "target")?;
                if tokens.next().is_some() {
                    return Err(err(no, "trailing tokens after edge"));
                }
                if u == v {
                    return Err(err(no, format!("self-loop {u} -> {u}")));
                }
                if !seen.insert((u, v)) {
                    return Err(err(no, format!("duplicate edge {u} -> {v}")));
                }
                edges.push((u, v));
            }
            let d = Digraph::from_edges(n, &edges).map_err(|e| err(0, e.to_string()))?;
            Ok(GraphFile::Digraph(d))
        }
        Header::Bipartite { n, m } => {
            let mut seen = HashSet::new();
            let (mut demand, mut supply) = (Vec::new(), Vec::new());
            for (no, line) in body {
                let mut tokens = line.split_whitespace();
                let tag = tokens.next().unwrap_or("");
                let link = match tag {
                    "A" => {
                        let i = parse_id(no, tokens.next(), n, "actor")?;
                        let k = parse_id(no, tokens.next(), m, "attribute")?;
                        demand.push((i, k));
                        ('A', i, k)
                    }
                    "S" => {
                        let k = parse_id(no, tokens.next(), m, "attribute")?;
                        let i = parse_id(no, tokens.next(), n, "actor")?;
                        supply.push((k, i));
                        ('S', k, i)
                    }
                    _ => return Err(err(no, format!("expected `A i k` or `S k i`, found `{line}`"))),
                };
                if tokens.next().is_some() {
                    return Err(err(no, "trailing tokens after link"));
                }
                if !seen.insert(link) {
                    return Err(err(no, format!("duplicate link `{line}`")));
                }
            }
            let h = BipartiteDigraph::from_links(n, m, &demand, &supply).map_err(|e| err(0, e.to_string()))?;
            Ok(GraphFile::Bipartite(h))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::project;

    #[test]
    fn follower_fixture_projects_to_single_edge() {
        let text = "# bipartite n=2 m=1\n# actor 0 demands w0, actor 1 supplies it\nA 0 0\nS 0 1\n";
        let GraphFile::Bipartite(h) = parse_graph(text).unwrap() else { panic!("kind") };
        assert_eq!(write_digraph(&project(&h)), "# digraph n=2\n0 1\n");
        assert_eq!(write_bipartite(&h), "# bipartite n=2 m=1\nA 0 0\nS 0 1\n");
    }

    #[test]
    fn digraph_round_trip() {
        let d = Digraph::from_edges(5, &[(3, 1), (0, 4), (0, 2), (4, 0)]).unwrap();
        let text = write_digraph(&d);
        assert_eq!(text, "# digraph n=5\n0 2\n0 4\n3 1\n4 0\n");
        assert_eq!(parse_graph(&text).unwrap(), GraphFile::Digraph(d));
    }

    #[test]
    fn empty_edge_list() {
        let GraphFile::Digraph(d) = parse_graph("# digraph n=3\n").unwrap() else { panic!() };
        assert_eq!(d.edge_count(), 0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dup = parse_graph("# digraph n=3\n0 1\n\n0 1\n").unwrap_err();
        assert_eq!(dup.line, 4);
        assert!(dup.message.contains("duplicate"));
        assert_eq!(parse_graph("# digraph n=3\n1 1\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("# digraph n=3\n0 3\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("# digraph n=3\n0 x\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("0 1\n").unwrap_err().line, 1);
        assert_eq!(parse_graph("# graph n=3\n").unwrap_err().line, 1);
        assert_eq!(parse_graph("# bipartite n=2 m=1\nA 0 0\nA 0 0\n").unwrap_err().line, 3);
        assert_eq!(parse_graph("# bipartite n=2 m=1\nX 0 0\n").unwrap_err().line, 2);
    }
}
