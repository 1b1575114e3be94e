//! Closed 2-neighbourhood sizes from a tree decomposition, in time
//! `O(2^w w n)` for width `w`.
//!
//! The pipeline is [`validate_td`] → [`make_nice`] → [`past_tables`] →
//! [`future_tables`] → [`second_pass`]; [`solve_tw`] runs it with bounded
//! memory, keeping only the tables that are still needed.

mod dp;
mod heuristic;
mod io;
mod nice;

use std::collections::VecDeque;

use thiserror::Error;

pub use dp::{future_tables, past_tables, second_pass, solve_tw, solve_tw_with, TwConfig};
pub use heuristic::{greedy_td, grid_decomposition, EliminationStrategy};
pub use io::{parse_td, write_td};
pub use nice::{make_nice, NiceDecomposition, NiceKind, NiceNode};

use crate::graph::Graph;

/// Default largest width `solve_tw` accepts.
pub const DEFAULT_MAX_WIDTH: usize = 25;

/// Bags are bitmask-indexed with `u32`, so no bag may exceed 32 vertices.
pub const HARD_MAX_WIDTH: usize = 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<TdError>,
    },
    #[error("malformed decomposition: {0}")]
    Malformed(String),
    #[error("bag {bag} out of range for {bags} bags")]
    BagOutOfRange { bag: usize, bags: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid tree decomposition: {0}")]
    Invalid(ValidationReport),
    #[error("decomposition width {width} exceeds the cap of {cap}; supply a narrower decomposition, use the bfs or vc backend, or raise the cap (tables grow as 2^width)")]
    WidthTooLarge { width: usize, cap: usize },
}

impl TdError {
    fn at_line(self, line: usize) -> Self {
        TdError::AtLine {
            line,
            source: Box::new(self),
        }
    }

    pub fn root(&self) -> &TdError {
        match self {
            TdError::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Bags of vertices arranged on a tree given by edges between bag indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Each bag sorted, without repeats.
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges }
    }

    /// Largest bag size minus one; 0 when there are no bags.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// Bag adjacency lists, or `None` if an edge names a missing bag.
    fn tree_adjacency(&self) -> Option<Vec<Vec<usize>>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            if a >= self.bags.len() || b >= self.bags.len() {
                return None;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        Some(adj)
    }

    /// Whether `edges` form a spanning tree on the bags.
    fn is_tree(&self) -> Result<(), String> {
        let k = self.bags.len();
        let adj = self
            .tree_adjacency()
            .ok_or_else(|| "tree edge names a missing bag".to_string())?;
        if k == 0 {
            return if self.edges.is_empty() {
                Ok(())
            } else {
                Err("edges without bags".into())
            };
        }
        if self.edges.len() != k - 1 {
            return Err(format!(
                "{} tree edges for {} bags (expected {})",
                self.edges.len(),
                k,
                k - 1
            ));
        }
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                    queue.push_back(b);
                }
            }
        }
        if count != k {
            let missing = seen.iter().position(|s| !s).unwrap();
            return Err(format!("bag {missing} is not connected to bag 0"));
        }
        Ok(())
    }
}

/// One witness per violated condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotATree(String),
    VertexOutOfRange {
        bag: usize,
        vertex: usize,
    },
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    /// The bags containing this vertex do not form a connected subtree.
    OccurrenceDisconnected(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v {
                Violation::NotATree(why) => format!("not a tree ({why})"),
                Violation::VertexOutOfRange { bag, vertex } => {
                    format!("bag {bag} holds out-of-range vertex {vertex}")
                }
                Violation::VertexUncovered(v) => format!("vertex {v} is in no bag"),
                Violation::EdgeUncovered(u, v) => format!("edge {u}-{v} is in no bag"),
                Violation::OccurrenceDisconnected(v) => {
                    format!("bags containing vertex {v} are not connected")
                }
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks that `td` is a tree decomposition of `g`.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> ValidationReport {
    let mut violations = Vec::new();
    let n = g.n();

    let tree_ok = match td.is_tree() {
        Ok(()) => true,
        Err(why) => {
            violations.push(Violation::NotATree(why));
            false
        }
    };

    let out_of_range = td
        .bags
        .iter()
        .enumerate()
        .find_map(|(b, bag)| bag.iter().find(|&&v| v >= n).map(|&v| (b, v)));
    if let Some((bag, vertex)) = out_of_range {
        violations.push(Violation::VertexOutOfRange { bag, vertex });
    }

    let mut occurrences = vec![0usize; n];
    for bag in &td.bags {
        for &v in bag.iter().filter(|&&v| v < n) {
            occurrences[v] += 1;
        }
    }
    if let Some(v) = occurrences.iter().position(|&c| c == 0) {
        violations.push(Violation::VertexUncovered(v));
    }

    // Mark each edge covered when both endpoints share a bag.
    let mut stamp = vec![usize::MAX; n];
    let mut covered = std::collections::HashSet::new();
    for (b, bag) in td.bags.iter().enumerate() {
        for &v in bag.iter().filter(|&&v| v < n) {
            stamp[v] = b;
        }
        for &u in bag.iter().filter(|&&v| v < n) {
            for &w in g.neighbors(u) {
                if u < w && stamp[w] == b {
                    covered.insert((u, w));
                }
            }
        }
    }
    if covered.len() != g.m() {
        let missing = g.edges().find(|e| !covered.contains(e)).unwrap();
        violations.push(Violation::EdgeUncovered(missing.0, missing.1));
    }

    // In a tree, the bags holding v are connected iff the tree edges whose
    // endpoints both hold v number one less than the bags holding v.
    if tree_ok {
        let mut shared = vec![0usize; n];
        for &(a, b) in &td.edges {
            let (x, y) = (&td.bags[a], &td.bags[b]);
            let (mut i, mut j) = (0, 0);
            while i < x.len() && j < y.len() {
                match x[i].cmp(&y[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if x[i] < n {
                            shared[x[i]] += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| occurrences[v] > 0 && shared[v] + 1 != occurrences[v]) {
            violations.push(Violation::OccurrenceDisconnected(v));
        }
    }

    ValidationReport { violations }
}
