use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::Graph;

use super::VcError;

/// Default work cap for the exact cover search, in vertex scans.
pub const DEFAULT_BRANCH_BUDGET: u64 = 1 << 28;

/// Checks that `cover` lists distinct in-range vertices meeting every edge.
pub fn validate_cover(g: &Graph, cover: &[usize]) -> Result<(), VcError> {
    let mut in_cover = vec![false; g.n()];
    for &v in cover {
        if v >= g.n() {
            return Err(VcError::OutOfRange {
                vertex: v,
                n: g.n(),
            });
        }
        if std::mem::replace(&mut in_cover[v], true) {
            return Err(VcError::DuplicateCoverVertex(v));
        }
    }
    match g.edges().find(|&(u, v)| !in_cover[u] && !in_cover[v]) {
        Some((u, v)) => Err(VcError::Uncovered(u, v)),
        None => Ok(()),
    }
}

/// Returns `hint` after validation, or a minimum vertex cover found by
/// bounded search when no hint is given.
pub fn find_vertex_cover(g: &Graph, hint: Option<&[usize]>) -> Result<Vec<usize>, VcError> {
    find_vertex_cover_with_budget(g, hint, DEFAULT_BRANCH_BUDGET, usize::MAX)
}

/// As [`find_vertex_cover`], but gives up once the search has spent `budget`
/// vertex scans (each branch node scans the whole graph once), and fails fast
/// when no cover of at most `max_size` vertices can exist.
pub fn find_vertex_cover_with_budget(
    g: &Graph,
    hint: Option<&[usize]>,
    budget: u64,
    max_size: usize,
) -> Result<Vec<usize>, VcError> {
    if let Some(cover) = hint {
        validate_cover(g, cover)?;
        return Ok(cover.to_vec());
    }
    minimum_vertex_cover(g, budget, max_size)
}

/// Repeatedly takes a vertex of maximum remaining degree.
pub fn greedy_cover(g: &Graph) -> Vec<usize> {
    let mut deg = g.degrees();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..g.n()).map(|v| (deg[v], Reverse(v))).collect();
    let mut alive = vec![true; g.n()];
    let mut edges_left = g.m();
    let mut cover = Vec::new();
    while edges_left > 0 {
        let (d, Reverse(v)) = heap.pop().expect("edges remain, so some vertex is queued");
        if !alive[v] || d != deg[v] {
            continue;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                edges_left -= 1;
                heap.push((deg[w], Reverse(w)));
            }
        }
        cover.push(v);
    }
    cover.sort_unstable();
    cover
}

/// Size of a greedy maximal matching, a lower bound on any cover.
fn matching_lower_bound(g: &Graph) -> usize {
    let mut matched = vec![false; g.n()];
    let mut size = 0;
    for (u, v) in g.edges() {
        if !matched[u] && !matched[v] {
            matched[u] = true;
            matched[v] = true;
            size += 1;
        }
    }
    size
}

fn minimum_vertex_cover(g: &Graph, budget: u64, max_size: usize) -> Result<Vec<usize>, VcError> {
    let lower = matching_lower_bound(g);
    if lower > max_size {
        return Err(VcError::NoCoverWithin { cap: max_size });
    }
    let greedy = greedy_cover(g);
    let mut search = Search::new(g, budget);
    for k in lower..greedy.len().min(max_size.saturating_add(1)) {
        if search.branch(k)? {
            let mut cover = search.taken.clone();
            cover.sort_unstable();
            log::debug!(
                "minimum cover of size {} (greedy {})",
                cover.len(),
                greedy.len()
            );
            return Ok(cover);
        }
        debug_assert!(search.taken.is_empty());
    }
    if greedy.len() > max_size {
        return Err(VcError::NoCoverWithin { cap: max_size });
    }
    Ok(greedy)
}

/// Exact search state: vertices are removed as they join the cover and put
/// back in LIFO order on backtrack.
struct Search<'g> {
    g: &'g Graph,
    alive: Vec<bool>,
    deg: Vec<usize>,
    edges_left: usize,
    taken: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, budget: u64) -> Self {
        Search {
            g,
            alive: vec![true; g.n()],
            deg: g.degrees(),
            edges_left: g.m(),
            taken: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn take(&mut self, v: usize) {
        self.alive[v] = false;
        for &w in self.g.neighbors(v) {
            if self.alive[w] {
                self.deg[w] -= 1;
                self.edges_left -= 1;
            }
        }
        self.taken.push(v);
    }

    fn untake_to(&mut self, len: usize) {
        while self.taken.len() > len {
            let v = self.taken.pop().unwrap();
            self.alive[v] = true;
            for &w in self.g.neighbors(v) {
                if self.alive[w] {
                    self.deg[w] += 1;
                    self.edges_left += 1;
                }
            }
        }
    }

    /// Is there a cover of the remaining graph with at most `k` more
    /// vertices? On success the cover is left in `taken`.
    fn branch(&mut self, k: usize) -> Result<bool, VcError> {
        self.nodes += self.g.n() as u64 + 1;
        if self.nodes > self.budget {
            self.untake_to(0);
            return Err(VcError::BudgetExceeded(self.budget));
        }
        if self.edges_left == 0 {
            return Ok(true);
        }
        if k == 0 {
            return Ok(false);
        }

        let mut best = usize::MAX;
        let mut pendant = None;
        for v in 0..self.g.n() {
            if !self.alive[v] || self.deg[v] == 0 {
                continue;
            }
            if best == usize::MAX || self.deg[v] > self.deg[best] {
                best = v;
            }
            if self.deg[v] == 1 && pendant.is_none() {
                pendant = Some(v);
            }
        }
        let max_deg = self.deg[best];
        if self.edges_left > k * max_deg {
            return Ok(false);
        }

        let mark = self.taken.len();

        // A pendant vertex's neighbour can always replace it in a cover.
        if let Some(p) = pendant {
            let w = self.alive_neighbors(p).next().unwrap();
            self.take(w);
            if self.branch(k - 1)? {
                return Ok(true);
            }
            self.untake_to(mark);
            return Ok(false);
        }

        self.take(best);
        if self.branch(k - 1)? {
            return Ok(true);
        }
        self.untake_to(mark);
        // leaving `best` out would take more than k of its neighbours
        if max_deg > k {
            return Ok(false);
        }

        let nbrs: Vec<usize> = self.alive_neighbors(best).collect();
        for &w in &nbrs {
            self.take(w);
        }
        if self.branch(k - nbrs.len())? {
            return Ok(true);
        }
        self.untake_to(mark);
        Ok(false)
    }

    fn alive_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.g
            .neighbors(v)
            .iter()
            .copied()
            .filter(move |&w| self.alive[w])
    }
}
