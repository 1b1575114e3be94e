use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EdgeCollector, Graph, GraphError};

/// Text formats understood by [`parse_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    /// Header `n m`, then `m` lines `u v` with 0-indexed vertices; `#` comments.
    EdgeList,
    /// PACE `.gr`: header `p tw n m`, 1-indexed edges, `c` comments.
    PaceGr,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-list" | "edgelist" => Ok(GraphFormat::EdgeList),
            "pace-gr" | "gr" => Ok(GraphFormat::PaceGr),
            other => Err(format!("unknown graph format `{other}`")),
        }
    }
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph, GraphError> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::PaceGr => parse_pace(text),
    }
}

fn parse_num(tok: &str) -> Result<usize, GraphError> {
    tok.parse()
        .map_err(|_| GraphError::Malformed(format!("expected a non-negative integer, got `{tok}`")))
}

fn two_numbers(line: &str) -> Result<(usize, usize), GraphError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.as_slice() {
        [a, b] => Ok((parse_num(a)?, parse_num(b)?)),
        _ => Err(GraphError::Malformed(format!(
            "expected two integers, got `{line}`"
        ))),
    }
}

fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| GraphError::Malformed("missing `n m` header".into()))?;
    let (n, m) = two_numbers(header).map_err(|e| e.at_line(hline))?;

    let mut edges = EdgeCollector::default();
    for (lineno, line) in lines {
        let (u, v) = two_numbers(line).map_err(|e| e.at_line(lineno))?;
        edges.push(n, u, v).map_err(|e| e.at_line(lineno))?;
    }
    if edges.len() != m {
        return Err(GraphError::EdgeCount {
            declared: m,
            found: edges.len(),
        });
    }
    edges.finish(n)
}

fn parse_pace(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = EdgeCollector::default();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(GraphError::Malformed("second `p` header".into()).at_line(lineno));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["p", "tw", n, m] => {
                    header = Some((
                        parse_num(n).map_err(|e| e.at_line(lineno))?,
                        parse_num(m).map_err(|e| e.at_line(lineno))?,
                    ));
                }
                _ => {
                    return Err(GraphError::Malformed(format!(
                        "expected `p tw <n> <m>`, got `{line}`"
                    ))
                    .at_line(lineno))
                }
            }
            continue;
        }
        let Some((n, _)) = header else {
            return Err(GraphError::Malformed("edge before `p tw` header".into()).at_line(lineno));
        };
        let (u, v) = two_numbers(line).map_err(|e| e.at_line(lineno))?;
        if u == 0 || v == 0 {
            return Err(
                GraphError::Malformed("vertex 0 in a 1-indexed file".into()).at_line(lineno)
            );
        }
        edges.push(n, u - 1, v - 1).map_err(|e| e.at_line(lineno))?;
    }

    let (n, m) = header.ok_or_else(|| GraphError::Malformed("missing `p tw` header".into()))?;
    if edges.len() != m {
        return Err(GraphError::EdgeCount {
            declared: m,
            found: edges.len(),
        });
    }
    edges.finish(n)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_pace(g: &Graph) -> String {
    let mut out = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(out, "p tw {} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn edge_list_path() {
        let g = parse_graph("3 2\n0 1\n1 2", GraphFormat::EdgeList).unwrap();
        assert_eq!(g, path3());
    }

    #[test]
    fn pace_path_is_shifted() {
        let g = parse_graph("c a path\np tw 3 2\n1 2\n2 3\n", GraphFormat::PaceGr).unwrap();
        assert_eq!(g, path3());
    }

    #[test]
    fn comments_and_isolated_vertices() {
        let g = parse_graph("# hello\n5 1\n\n# edge\n3 4\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.degree(0), 0);
        assert!(g.has_edge(3, 4));
    }

    #[test]
    fn self_loop_is_rejected_with_line() {
        let err = parse_graph("2 1\n0 0", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err, GraphError::AtLine { line: 2, .. }), "{err}");
        assert_eq!(err.root(), &GraphError::SelfLoop(0));
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let err = parse_graph("3 2\n0 1\n1 0\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err, GraphError::AtLine { line: 3, .. }));
        assert_eq!(err.root(), &GraphError::DuplicateEdge(0, 1));
    }

    #[test]
    fn malformed_and_out_of_range() {
        let err = parse_graph("3 1\n0 x\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err.root(), GraphError::Malformed(_)));
        let err = parse_graph("3 1\n0 3\n", GraphFormat::EdgeList).unwrap_err();
        assert_eq!(err.root(), &GraphError::OutOfRange { vertex: 3, n: 3 });
        let err = parse_graph("p tw 3 1\n0 1\n", GraphFormat::PaceGr).unwrap_err();
        assert!(matches!(err.root(), GraphError::Malformed(_)));
        let err = parse_graph("", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(err, GraphError::Malformed(_)));
        let err = parse_graph("1 2\n", GraphFormat::PaceGr).unwrap_err();
        assert!(matches!(err.root(), GraphError::Malformed(_)));
    }

    #[test]
    fn edge_count_must_match_header() {
        let err = parse_graph("3 2\n0 1\n", GraphFormat::EdgeList).unwrap_err();
        assert_eq!(
            err,
            GraphError::EdgeCount {
                declared: 2,
                found: 1
            }
        );
    }

    #[test]
    fn writers_round_trip() {
        let g = Graph::from_edges(6, [(0, 5), (1, 2), (2, 5), (3, 4)]).unwrap();
        assert_eq!(
            parse_graph(&write_edge_list(&g), GraphFormat::EdgeList).unwrap(),
            g
        );
        assert_eq!(
            parse_graph(&write_pace(&g), GraphFormat::PaceGr).unwrap(),
            g
        );
    }
}
