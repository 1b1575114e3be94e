use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use super::sizes::{Backend, Mode, SizesResult};
use super::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SizesError {
    #[error("vertex counts differ: {0} vs {1}")]
    VertexCount(usize, usize),
    #[error("radii must be r and r-1, got {0} and {1}")]
    Radii(usize, usize),
    #[error("both inputs must be closed-mode sizes")]
    NotClosed,
}

/// Reusable scratch space for truncated BFS runs over one graph.
///
/// Visited marks are timestamps, so consecutive runs never clear the array.
pub struct BfsScratch {
    stamp: Vec<u32>,
    current: u32,
    queue: Vec<usize>,
}

impl BfsScratch {
    pub fn new(n: usize) -> Self {
        BfsScratch {
            stamp: vec![0; n],
            current: 0,
            queue: Vec::with_capacity(n),
        }
    }

    fn next_stamp(&mut self) {
        if self.current == u32::MAX {
            self.stamp.fill(0);
            self.current = 0;
        }
        self.current += 1;
    }

    /// Runs BFS from `src` up to depth `r` and returns the vertices reached in
    /// BFS order (`src` first) together with the start offset of the layer at
    /// distance exactly `r`. When fewer than `r` layers exist the offset equals
    /// the slice length, so that layer is empty.
    pub fn ball(&mut self, g: &Graph, src: usize, r: usize) -> (&[usize], usize) {
        self.next_stamp();
        let cur = self.current;
        self.queue.clear();
        self.queue.push(src);
        self.stamp[src] = cur;

        let mut layer_start = 0;
        for _ in 0..r {
            let layer_end = self.queue.len();
            for i in layer_start..layer_end {
                let u = self.queue[i];
                for &w in g.neighbors(u) {
                    if self.stamp[w] != cur {
                        self.stamp[w] = cur;
                        self.queue.push(w);
                    }
                }
            }
            layer_start = layer_end;
            if layer_start == self.queue.len() {
                break;
            }
        }
        (&self.queue, layer_start)
    }

    /// `(|N^r[src]|, |N^r(src)|)`.
    pub fn counts(&mut self, g: &Graph, src: usize, r: usize) -> (usize, usize) {
        let (reached, last) = self.ball(g, src, r);
        (reached.len(), reached.len() - last)
    }
}

/// Closed or open `r`-neighbourhood sizes of every vertex by truncated BFS.
///
/// This is the reference every other backend is checked against.
pub fn bfs_sizes(g: &Graph, r: usize, mode: Mode) -> SizesResult {
    let start = Instant::now();
    let n = g.n();
    let sizes: Vec<usize> = (0..n)
        .into_par_iter()
        .map_init(
            || BfsScratch::new(n),
            |scratch, v| {
                let (closed, exact) = scratch.counts(g, v, r);
                match mode {
                    Mode::Closed => closed,
                    Mode::Open => exact,
                }
            },
        )
        .collect();
    let mut result = SizesResult::new(r, mode, sizes, Backend::Bfs);
    result.elapsed = start.elapsed();
    result
}

/// Open `r`-neighbourhood sizes from closed sizes at radii `r` and `r - 1`.
///
/// For `r = 1` pass [`SizesResult::radius_zero`] as the second argument.
pub fn open_from_closed(
    closed_r: &SizesResult,
    closed_rm1: &SizesResult,
) -> Result<SizesResult, SizesError> {
    if closed_r.mode != Mode::Closed || closed_rm1.mode != Mode::Closed {
        return Err(SizesError::NotClosed);
    }
    if closed_r.sizes.len() != closed_rm1.sizes.len() {
        return Err(SizesError::VertexCount(
            closed_r.sizes.len(),
            closed_rm1.sizes.len(),
        ));
    }
    if closed_r.r != closed_rm1.r + 1 {
        return Err(SizesError::Radii(closed_r.r, closed_rm1.r));
    }
    let sizes = closed_r
        .sizes
        .iter()
        .zip(&closed_rm1.sizes)
        .map(|(&a, &b)| a - b)
        .collect();
    let mut out = SizesResult::new(closed_r.r, Mode::Open, sizes, closed_r.backend);
    out.elapsed = closed_r.elapsed + closed_rm1.elapsed;
    Ok(out)
}
