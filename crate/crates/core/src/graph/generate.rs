use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

/// A generator recipe; every variant is deterministic for a fixed seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphKind {
    /// Uniform graph with exactly `m` edges.
    Gnm {
        n: usize,
        m: usize,
        seed: u64,
    },
    /// Vertices `0..t` form a cover; each of the other `n - t` vertices is
    /// adjacent to each cover vertex independently with probability `p`.
    Split {
        n: usize,
        t: usize,
        p: f64,
        seed: u64,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
}

pub fn generate(kind: &GraphKind) -> Result<Graph, GraphError> {
    match *kind {
        GraphKind::Gnm { n, m, seed } => gnm(n, m, seed),
        GraphKind::Split { n, t, p, seed } => split(n, t, p, seed),
        GraphKind::Grid { rows, cols } => grid(rows, cols),
    }
}

pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    let max_m = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_m {
        return Err(GraphError::InvalidParameter(format!(
            "m = {m} exceeds n(n-1)/2 = {max_m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Dense requests sample the complement instead.
    let complement = m > max_m / 2;
    let target = if complement { max_m - m } else { m };
    let mut chosen = HashSet::with_capacity(target);
    let mut order = Vec::with_capacity(target);
    while order.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if chosen.insert(e) {
            order.push(e);
        }
    }

    if complement {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|e| !chosen.contains(e));
        Graph::from_edges(n, edges)
    } else {
        Graph::from_edges(n, order)
    }
}

/// Bipartite instance whose vertex cover number is at most `t`; the cover is
/// `0..t`.
pub fn split(n: usize, t: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if t > n {
        return Err(GraphError::InvalidParameter(format!(
            "t = {t} exceeds n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!(
            "p = {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in t..n {
        for x in 0..t {
            if rng.gen_bool(p) {
                edges.push((x, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// `rows x cols` grid; vertex `(r, c)` has index `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| GraphError::InvalidParameter("grid too large".into()))?;
    let mut edges = Vec::with_capacity(2 * n);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(n, edges)
}
