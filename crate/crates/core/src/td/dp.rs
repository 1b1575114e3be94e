//! Table recurrences over a nice decomposition.
//!
//! For node `i` with bag `X_i`, `P_i` is the set of vertices that occur only
//! strictly below `i` and `F_i` the set that never occurs at or below `i`.
//! Tables are indexed by bag subsets `Y`, bit `k` standing for `bag[k]`:
//!
//! * past   `N^P_i[Y] = |N(Y) ∩ P_i|`
//! * future `N^F_i[Y] = |N(Y) ∩ F_i|`
//!
//! A second bottom-up pass tracks, per bag vertex `u`, its bag neighbours,
//! the bag vertices sharing a neighbour in `P_i` with it, and the number of
//! past vertices within distance 2. A vertex's size is assembled just before
//! it is forgotten, when every neighbour of it is in the bag or the past.

use std::time::Instant;

use super::{
    greedy_td, make_nice, validate_td, EliminationStrategy, NiceDecomposition, NiceKind, TdError,
    TreeDecomposition, DEFAULT_MAX_WIDTH, HARD_MAX_WIDTH,
};
use crate::graph::{Backend, Graph, Mode, SizesResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwConfig {
    /// Largest accepted width; values above 31 are clamped.
    pub max_width: usize,
    /// Heuristic used when no decomposition is supplied.
    pub strategy: EliminationStrategy,
}

impl Default for TwConfig {
    fn default() -> Self {
        TwConfig {
            max_width: DEFAULT_MAX_WIDTH,
            strategy: EliminationStrategy::MinFill,
        }
    }
}

/// Spreads `mask` to make room for a new bit at `p`; the new bit is clear.
#[inline]
fn insert_bit(mask: usize, p: usize) -> usize {
    let low = (1usize << p) - 1;
    (mask & low) | ((mask >> p) << (p + 1))
}

/// Drops bit `p` from `mask`, closing the gap.
#[inline]
fn remove_bit(mask: usize, p: usize) -> usize {
    let low = (1usize << p) - 1;
    (mask & low) | ((mask >> (p + 1)) << p)
}

/// Bits of `bag` adjacent to `v`.
fn neighbor_mask(g: &Graph, bag: &[usize], v: usize) -> usize {
    bag.iter()
        .enumerate()
        .filter(|&(_, &x)| g.has_edge(v, x))
        .fold(0, |m, (k, _)| m | 1 << k)
}

fn bits(mut mask: usize) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let k = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            k
        })
    })
}

fn past_step(g: &Graph, nd: &NiceDecomposition, i: usize, kids: &[&[u32]]) -> Vec<u32> {
    let node = nd.node(i);
    let len = 1usize << node.bag.len();
    match node.kind {
        NiceKind::Leaf => vec![0],
        NiceKind::Introduce { pos, .. } => {
            let c = kids[0];
            (0..len).map(|y| c[remove_bit(y, pos)]).collect()
        }
        NiceKind::Forget { vertex, pos } => {
            let c = kids[0];
            let adj = neighbor_mask(g, &nd.node(node.children[0]).bag, vertex);
            (0..len)
                .map(|y| {
                    let cy = insert_bit(y, pos);
                    c[cy] + u32::from(cy & adj != 0)
                })
                .collect()
        }
        NiceKind::Join => kids[0].iter().zip(kids[1]).map(|(a, b)| a + b).collect(),
    }
}

/// Future table of the `k`-th child of node `p`. Joins need the past table
/// of the other child.
fn future_child(
    g: &Graph,
    nd: &NiceDecomposition,
    p: usize,
    k: usize,
    parent: &[u32],
    sibling_past: Option<&[u32]>,
) -> Vec<u32> {
    let node = nd.node(p);
    let len = 1usize << nd.node(node.children[k]).bag.len();
    match node.kind {
        NiceKind::Leaf => unreachable!("leaves have no children"),
        NiceKind::Introduce { vertex, pos } => {
            let adj = neighbor_mask(g, &node.bag, vertex);
            (0..len)
                .map(|y| {
                    let py = insert_bit(y, pos);
                    parent[py] + u32::from(py & adj != 0)
                })
                .collect()
        }
        NiceKind::Forget { pos, .. } => (0..len).map(|y| parent[remove_bit(y, pos)]).collect(),
        NiceKind::Join => {
            let sib = sibling_past.expect("join children need the sibling's past table");
            parent.iter().zip(sib).map(|(a, b)| a + b).collect()
        }
    }
}

/// Past tables of every node, indexed like `nd.nodes()`.
pub fn past_tables(g: &Graph, nd: &NiceDecomposition) -> Vec<Vec<u32>> {
    let mut tables: Vec<Vec<u32>> = Vec::with_capacity(nd.len());
    for i in 0..nd.len() {
        let kids: Vec<&[u32]> = nd
            .node(i)
            .children
            .iter()
            .map(|&c| tables[c].as_slice())
            .collect();
        let t = past_step(g, nd, i, &kids);
        tables.push(t);
    }
    tables
}

/// Future tables of every node, computed root-down from `past`.
pub fn future_tables(g: &Graph, nd: &NiceDecomposition, past: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut tables = vec![Vec::new(); nd.len()];
    tables[nd.root()] = vec![0; 1 << nd.node(nd.root()).bag.len()];
    for p in (0..nd.len()).rev() {
        let children = &nd.node(p).children;
        for (k, &c) in children.iter().enumerate() {
            let sibling = (children.len() == 2).then(|| past[children[1 - k]].as_slice());
            tables[c] = future_child(g, nd, p, k, &tables[p], sibling);
        }
    }
    tables
}

/// Per bag position, in the node's sorted bag order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct BagState {
    /// Past vertices within distance 2.
    cnt2: Vec<usize>,
    /// Bag neighbours.
    adj: Vec<usize>,
    /// Bag vertices with a common neighbour in the past.
    common: Vec<usize>,
}

/// A vertex about to be forgotten: everything but the future term.
struct Emit {
    vertex: usize,
    /// The forget node's child, whose future table supplies the last term.
    child: usize,
    mask: usize,
    partial: usize,
}

fn state_step(
    g: &Graph,
    nd: &NiceDecomposition,
    i: usize,
    mut kids: Vec<BagState>,
    own_past: &[u32],
) -> (BagState, Option<Emit>) {
    let node = nd.node(i);
    match node.kind {
        NiceKind::Leaf => (BagState::default(), None),
        NiceKind::Introduce { vertex, pos } => {
            let mut s = kids.pop().unwrap();
            for m in s.adj.iter_mut().chain(s.common.iter_mut()) {
                *m = insert_bit(*m, pos);
            }
            let av = neighbor_mask(g, &node.bag, vertex);
            s.cnt2.insert(pos, own_past[av] as usize);
            s.adj.insert(pos, av);
            s.common.insert(pos, 0);
            for k in bits(av) {
                s.adj[k] |= 1 << pos;
            }
            (s, None)
        }
        NiceKind::Forget { vertex, pos } => {
            let mut s = kids.pop().unwrap();
            let av = s.adj[pos];
            let bit = 1usize << pos;
            let mut within_two = 0;
            for k in (0..s.adj.len()).filter(|&k| k != pos) {
                if s.adj[k] & bit != 0 || s.adj[k] & av != 0 || s.common[k] & bit != 0 {
                    within_two += 1;
                    s.cnt2[k] += 1;
                }
            }
            let emit = Emit {
                vertex,
                child: node.children[0],
                mask: av,
                partial: 1 + s.cnt2[pos] + within_two,
            };
            for x in bits(av) {
                s.common[x] |= av & !(1 << x);
            }
            s.cnt2.remove(pos);
            s.adj.remove(pos);
            s.common.remove(pos);
            for m in s.adj.iter_mut().chain(s.common.iter_mut()) {
                *m = remove_bit(*m, pos);
            }
            (s, Some(emit))
        }
        NiceKind::Join => {
            let b = kids.pop().unwrap();
            let mut a = kids.pop().unwrap();
            for (x, y) in a.cnt2.iter_mut().zip(&b.cnt2) {
                *x += y;
            }
            for (x, y) in a.common.iter_mut().zip(&b.common) {
                *x |= y;
            }
            (a, None)
        }
    }
}

fn second_pass_observed(
    g: &Graph,
    nd: &NiceDecomposition,
    past: &[Vec<u32>],
    future: &[Vec<u32>],
    observer: &mut dyn FnMut(usize, &BagState),
) -> Vec<usize> {
    let mut states: Vec<Option<BagState>> = vec![None; nd.len()];
    let mut sizes = vec![0; g.n()];
    for i in 0..nd.len() {
        let kids = nd
            .node(i)
            .children
            .iter()
            .map(|&c| states[c].take().expect("children precede parents"))
            .collect();
        let (s, emit) = state_step(g, nd, i, kids, &past[i]);
        if let Some(e) = emit {
            sizes[e.vertex] = e.partial + future[e.child][e.mask] as usize;
        }
        observer(i, &s);
        states[i] = Some(s);
    }
    sizes
}

/// Closed 2-neighbourhood sizes from fully materialized tables.
pub fn second_pass(
    g: &Graph,
    nd: &NiceDecomposition,
    past: &[Vec<u32>],
    future: &[Vec<u32>],
) -> SizesResult {
    let sizes = second_pass_observed(g, nd, past, future, &mut |_, _| {});
    let mut result = SizesResult::new(2, Mode::Closed, sizes, Backend::Tw);
    result.parameter = Some(nd.width());
    result.peak_table_entries = Some(past.iter().chain(future).map(Vec::len).sum());
    result
}

#[derive(Default)]
struct LiveEntries {
    now: usize,
    peak: usize,
}

impl LiveEntries {
    fn add(&mut self, k: usize) {
        self.now += k;
        self.peak = self.peak.max(self.now);
    }

    fn sub(&mut self, k: usize) {
        self.now -= k;
    }
}

/// Both passes, holding a table only while some later step still reads it.
/// Returns the sizes and the peak number of live table entries.
fn solve_streaming(g: &Graph, nd: &NiceDecomposition) -> (Vec<usize>, usize) {
    let len = nd.len();
    let mut live = LiveEntries::default();
    let mut sizes = vec![0; g.n()];
    let mut pending: Vec<Option<(Vec<u32>, BagState)>> = (0..len).map(|_| None).collect();
    let mut join_past: Vec<Option<Vec<u32>>> = vec![None; len];
    let mut queries: Vec<Vec<(usize, usize)>> = vec![Vec::new(); len];

    for i in 0..len {
        let node = nd.node(i);
        let (tables, states): (Vec<Vec<u32>>, Vec<BagState>) = node
            .children
            .iter()
            .map(|&c| pending[c].take().expect("children precede parents"))
            .unzip();
        let kid_tables: Vec<&[u32]> = tables.iter().map(Vec::as_slice).collect();
        let table = past_step(g, nd, i, &kid_tables);
        live.add(table.len());
        let (state, emit) = state_step(g, nd, i, states, &table);
        if let Some(e) = emit {
            sizes[e.vertex] = e.partial;
            queries[e.child].push((e.vertex, e.mask));
        }
        for (&c, t) in node.children.iter().zip(tables) {
            if node.kind == NiceKind::Join {
                join_past[c] = Some(t);
            } else {
                live.sub(t.len());
            }
        }
        pending[i] = Some((table, state));
    }
    if let Some((t, _)) = pending[nd.root()].take() {
        live.sub(t.len());
    }

    let mut future: Vec<Option<Vec<u32>>> = vec![None; len];
    future[nd.root()] = Some(vec![0; 1 << nd.node(nd.root()).bag.len()]);
    live.add(1 << nd.node(nd.root()).bag.len());
    for p in (0..len).rev() {
        let f = future[p].take().expect("parents precede children top-down");
        for (v, mask) in std::mem::take(&mut queries[p]) {
            sizes[v] += f[mask] as usize;
        }
        let children = &nd.node(p).children;
        for (k, &c) in children.iter().enumerate() {
            let sibling = (children.len() == 2).then(|| {
                join_past[children[1 - k]]
                    .as_deref()
                    .expect("join children keep their past tables")
            });
            let t = future_child(g, nd, p, k, &f, sibling);
            live.add(t.len());
            future[c] = Some(t);
        }
        if children.len() == 2 {
            for &c in children {
                live.sub(join_past[c].take().map_or(0, |t| t.len()));
            }
        }
        live.sub(f.len());
    }
    (sizes, live.peak)
}

/// Closed 2-neighbourhood sizes through a tree decomposition; a greedy
/// min-fill decomposition is used when `td` is `None`.
pub fn solve_tw(g: &Graph, td: Option<&TreeDecomposition>) -> Result<SizesResult, TdError> {
    solve_tw_with(g, td, &TwConfig::default())
}

pub fn solve_tw_with(
    g: &Graph,
    td: Option<&TreeDecomposition>,
    config: &TwConfig,
) -> Result<SizesResult, TdError> {
    let start = Instant::now();
    let heuristic;
    let td = match td {
        Some(td) => {
            let report = validate_td(g, td);
            if !report.is_ok() {
                return Err(TdError::Invalid(report));
            }
            td
        }
        None => {
            heuristic = greedy_td(g, config.strategy);
            log::debug!(
                "{:?} decomposition of width {}",
                config.strategy,
                heuristic.width()
            );
            &heuristic
        }
    };
    let cap = config.max_width.min(HARD_MAX_WIDTH);
    if td.width() > cap {
        return Err(TdError::WidthTooLarge {
            width: td.width(),
            cap,
        });
    }
    let nd = make_nice(td)?;
    let (sizes, peak) = solve_streaming(g, &nd);
    let mut result = SizesResult::new(2, Mode::Closed, sizes, Backend::Tw);
    result.parameter = Some(td.width());
    result.peak_table_entries = Some(peak);
    result.elapsed = start.elapsed();
    Ok(result)
}
