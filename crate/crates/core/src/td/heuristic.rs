use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TreeDecomposition;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EliminationStrategy {
    MinDegree,
    MinFill,
}

impl FromStr for EliminationStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min-degree" => Ok(EliminationStrategy::MinDegree),
            "min-fill" => Ok(EliminationStrategy::MinFill),
            other => Err(format!(
                "unknown strategy `{other}` (expected min-degree|min-fill)"
            )),
        }
    }
}

/// Pairs of non-adjacent vertices among the neighbours of `v`.
fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Tree decomposition from a greedy elimination ordering.
///
/// Eliminating `v` creates the bag `{v} ∪ N(v)` in the current fill graph and
/// turns `N(v)` into a clique. Each bag hangs off the bag of its earliest
/// eliminated neighbour; bags of different components are chained together.
pub fn greedy_td(g: &Graph, strategy: EliminationStrategy) -> TreeDecomposition {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let key = |adj: &[BTreeSet<usize>], v: usize| match strategy {
        EliminationStrategy::MinDegree => adj[v].len(),
        EliminationStrategy::MinFill => fill_in(adj, v),
    };

    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).map(|v| Reverse((key(&adj, v), v))).collect();
    let mut eliminated = vec![false; n];
    let mut position = vec![0usize; n];
    let mut bags: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut later_nbrs: Vec<Vec<usize>> = Vec::with_capacity(n);

    while let Some(Reverse((k, v))) = heap.pop() {
        if eliminated[v] {
            continue;
        }
        let current = key(&adj, v);
        if current != k {
            heap.push(Reverse((current, v)));
            continue;
        }

        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = nbrs.clone();
        bag.push(v);
        position[v] = bags.len();
        bags.push(bag);
        eliminated[v] = true;

        for (i, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }

        let mut touched: BTreeSet<usize> = nbrs.iter().copied().collect();
        if strategy == EliminationStrategy::MinFill {
            for &a in &nbrs {
                touched.extend(adj[a].iter().copied());
            }
        }
        for u in touched {
            heap.push(Reverse((key(&adj, u), u)));
        }
        later_nbrs.push(nbrs);
    }

    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut last_root: Option<usize> = None;
    for (i, nbrs) in later_nbrs.iter().enumerate() {
        match nbrs.iter().map(|&w| position[w]).min() {
            Some(parent) => edges.push((i, parent)),
            None => {
                if let Some(r) = last_root {
                    edges.push((r, i));
                }
                last_root = Some(i);
            }
        }
    }
    TreeDecomposition::new(bags, edges)
}

/// Path decomposition of `grid(rows, cols)` with width `min(rows, cols)`:
/// a window of `w + 1` consecutive vertices sliding along the shorter side.
pub fn grid_decomposition(rows: usize, cols: usize) -> TreeDecomposition {
    let n = rows * cols;
    if n == 0 {
        return TreeDecomposition::new(vec![], vec![]);
    }
    let (w, order): (usize, Vec<usize>) = if rows <= cols {
        (rows, (0..n).map(|k| (k % rows) * cols + k / rows).collect())
    } else {
        (cols, (0..n).collect())
    };
    if n <= w + 1 {
        return TreeDecomposition::new(vec![order], vec![]);
    }
    let count = n - w;
    let bags = (0..count).map(|k| order[k..=k + w].to_vec()).collect();
    let edges = (1..count).map(|k| (k - 1, k)).collect();
    TreeDecomposition::new(bags, edges)
}
