//! DIMACS ASCII edge format.
//!
//! ```text
//! c comment
//! p edge <n> <m>
//! e <i> <j>
//! ```
//!
//! Indices are 1-based. `p col` headers (used by the coloring benchmarks)
//! are accepted as well.

use std::io::BufRead;

use crate::graph::{Graph, GraphError};

/// Parsed graph plus any non-fatal findings.
#[derive(Debug, Clone)]
pub struct DimacsGraph {
    pub graph: Graph,
    pub declared_edges: usize,
    pub warnings: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses DIMACS text from any buffered reader.
pub fn read_dimacs<R: BufRead>(reader: R) -> Result<DimacsGraph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut raw_edge_lines = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let mut tokens = line.split_whitespace();
        let Some(kind) = tokens.next() else { continue };
        match kind {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                let format = tokens
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing format"))?;
                if format != "edge" && format != "col" {
                    return Err(parse_err(lineno, format!("unsupported format '{format}'")));
                }
                let n = parse_count(tokens.next(), lineno, "vertex count")?;
                let m = parse_count(tokens.next(), lineno, "edge count")?;
                if n == 0 {
                    return Err(parse_err(lineno, "graph must have at least one vertex"));
                }
                header = Some((n, m));
            }
            "e" => {
                let (n, _) = header.ok_or_else(|| parse_err(lineno, "edge before problem line"))?;
                let i = parse_count(tokens.next(), lineno, "edge endpoint")?;
                let j = parse_count(tokens.next(), lineno, "edge endpoint")?;
                for v in [i, j] {
                    if v == 0 || v > n {
                        return Err(parse_err(lineno, format!("vertex {v} outside 1..{n}")));
                    }
                }
                if i == j {
                    return Err(parse_err(lineno, format!("self-loop at vertex {i}")));
                }
                edges.push((i - 1, j - 1));
                raw_edge_lines += 1;
            }
            other => return Err(parse_err(lineno, format!("unknown line type '{other}'"))),
        }
    }
    let (n, declared) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    let graph = Graph::from_edges(n, edges)?;
    let mut warnings = Vec::new();
    if declared != graph.m() {
        let msg = format!(
            "header declares {declared} edges, found {} distinct ({raw_edge_lines} edge lines)",
            graph.m()
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(DimacsGraph {
        graph,
        declared_edges: declared,
        warnings,
    })
}

fn parse_count(token: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

/// Parses DIMACS text, logging (not failing on) edge-count mismatches.
pub fn parse_dimacs(text: &str) -> Result<Graph, GraphError> {
    read_dimacs(text.as_bytes()).map(|parsed| parsed.graph)
}

/// Serializes `g` with 1-based indices and edges in lexicographic order.
pub fn write_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.m());
    for (i, j) in g.edges() {
        out.push_str(&format!("e {} {}\n", i + 1, j + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let g = parse_dimacs("c tiny\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert!(g.is_edge(0, 1) && g.is_edge(1, 2) && !g.is_edge(0, 2));
    }

    #[test]
    fn duplicate_edges_warn() {
        let parsed = read_dimacs("p edge 2 2\ne 1 2\ne 2 1\n".as_bytes()).unwrap();
        assert_eq!(parsed.graph.m(), 1);
        assert_eq!(parsed.warnings.len(), 1);
        let quiet = read_dimacs("p edge 2 1\ne 1 2\ne 2 1\n".as_bytes()).unwrap();
        assert!(quiet.warnings.is_empty());
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("p edge 0 0\n", 1),
            ("c x\ne 1 2\n", 2),
            ("p edge 3 1\ne 1 4\n", 2),
            ("p edge 3 1\ne 1\n", 2),
            ("p edge x 1\n", 1),
            ("p edge 3 1\nc ok\ne 2 2\n", 3),
            ("p edge 3 1\nq 1 2\n", 2),
        ];
        for (text, line) in cases {
            match parse_dimacs(text) {
                Err(GraphError::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        assert!(parse_dimacs("c only comments\n").is_err());
    }

    #[test]
    fn write_then_parse() {
        let g = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let text = write_dimacs(&g);
        assert!(text.starts_with("p edge 5 5\n"));
        assert_eq!(parse_dimacs(&text).unwrap(), g);
    }
}
