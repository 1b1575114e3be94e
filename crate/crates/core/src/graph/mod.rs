//! Undirected simple graphs, the truncated-BFS neighbourhood oracle, and
//! benchmark instance generators.

mod bfs;
mod generate;
mod io;
mod sizes;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use bfs::{bfs_sizes, open_from_closed, BfsScratch, SizesError};
pub use generate::{generate, gnm, grid, split, GraphKind};
pub use io::{parse_graph, write_edge_list, write_pace, GraphFormat};
pub use sizes::{checksum, Backend, Mode, SizesResult};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("header declares {declared} edges but {found} were read")]
    EdgeCount { declared: usize, found: usize },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

impl GraphError {
    fn at_line(self, line: usize) -> Self {
        GraphError::AtLine {
            line,
            source: Box::new(self),
        }
    }

    /// The underlying error with any line annotation stripped.
    pub fn root(&self) -> &GraphError {
        match self {
            GraphError::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}

/// An undirected simple graph on vertices `0..n` with sorted adjacency lists.
///
/// Immutable after construction; every constructor validates that there are
/// no self-loops, no duplicate edges, and no out-of-range endpoints.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// The graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            check_edge(n, u, v)?;
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { adj, m })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m)
            .finish()
    }
}

fn check_edge(n: usize, u: usize, v: usize) -> Result<(), GraphError> {
    for x in [u, v] {
        if x >= n {
            return Err(GraphError::OutOfRange { vertex: x, n });
        }
    }
    if u == v {
        return Err(GraphError::SelfLoop(u));
    }
    Ok(())
}

/// Collects edges while tracking duplicates, so parsers can report the line.
#[derive(Default)]
pub(crate) struct EdgeCollector {
    seen: HashSet<(usize, usize)>,
    edges: Vec<(usize, usize)>,
}

impl EdgeCollector {
    pub(crate) fn push(&mut self, n: usize, u: usize, v: usize) -> Result<(), GraphError> {
        check_edge(n, u, v)?;
        let key = (u.min(v), u.max(v));
        if !self.seen.insert(key) {
            return Err(GraphError::DuplicateEdge(key.0, key.1));
        }
        self.edges.push(key);
        Ok(())
    }

    pub(crate) fn len(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn finish(self, n: usize) -> Result<Graph, GraphError> {
        Graph::from_edges(n, self.edges)
    }
}
