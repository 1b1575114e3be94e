//! Closed 2-neighbourhood sizes in time exponential only in half the size of
//! a vertex cover.
//!
//! With a cover `X` of size `t`, the rest `I = V \ X` is independent. Its
//! vertices split into `I_l` (degree at most `t/2`) and `I_h`. Any two `I_h`
//! vertices share a neighbour, so they see each other. The remaining pairwise
//! contributions come from weighted set queries over neighbourhoods encoded
//! as `t`-bit masks (see [`crate::subset`]):
//!
//! * `I_l` seen from `v ∈ I_l`: `w^l_∩(N(v))`,
//! * `I_h` seen from `v ∈ I_l`: `|I_h| - w^h_⊆(N(v))`, with `w^h` keyed by
//!   `X \ N(u)`,
//! * `I_l` seen from `u ∈ I_h`: `|I_l| - w^l_⊇(X \ N(u))`.

mod cover;

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Backend, BfsScratch, Graph, Mode, SizesResult};
use crate::subset::{intersect_weight, mobius_restrict, SetMask, SubsetError, WeightedSetFamily};

pub use cover::{
    find_vertex_cover, find_vertex_cover_with_budget, greedy_cover, validate_cover,
    DEFAULT_BRANCH_BUDGET,
};

/// Default largest cover `solve_vc` accepts.
pub const DEFAULT_MAX_COVER: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VcError {
    #[error("not a vertex cover: edge {0}-{1} has no endpoint in the cover")]
    Uncovered(usize, usize),
    #[error("cover vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} listed twice in the cover")]
    DuplicateCoverVertex(usize),
    #[error("vertex cover search exceeded its budget of {0} vertex scans")]
    BudgetExceeded(u64),
    #[error("graph has no vertex cover of at most {cap} vertices")]
    NoCoverWithin { cap: usize },
    #[error("cover has {size} vertices, above the cap of {cap}; use the bfs or tw backend or raise the cap")]
    CoverTooLarge { size: usize, cap: usize },
    #[error(transparent)]
    Subset(#[from] SubsetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VcConfig {
    pub max_cover: usize,
    pub branch_budget: u64,
}

impl Default for VcConfig {
    fn default() -> Self {
        VcConfig {
            max_cover: DEFAULT_MAX_COVER,
            branch_budget: DEFAULT_BRANCH_BUDGET,
        }
    }
}

const NOT_IN_COVER: usize = usize::MAX;

/// A vertex cover `X` and the split of `I = V \ X` by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCoverPartition {
    cover: Vec<usize>,
    position: Vec<usize>,
    low: Vec<usize>,
    high: Vec<usize>,
}

impl VertexCoverPartition {
    /// `X`, in bit-position order.
    pub fn cover(&self) -> &[usize] {
        &self.cover
    }

    /// `I_l`: independent vertices with `2 deg(v) <= t`.
    pub fn low(&self) -> &[usize] {
        &self.low
    }

    /// `I_h`: independent vertices with `2 deg(v) > t`.
    pub fn high(&self) -> &[usize] {
        &self.high
    }

    pub fn t(&self) -> usize {
        self.cover.len()
    }

    /// Bit position of `v` if it is a cover vertex.
    pub fn bit_of(&self, v: usize) -> Option<usize> {
        match self.position[v] {
            NOT_IN_COVER => None,
            p => Some(p),
        }
    }

    pub fn in_cover(&self, v: usize) -> bool {
        self.position[v] != NOT_IN_COVER
    }

    /// `N(v) ∩ X` as a mask. Requires `t <= 64`.
    pub fn cover_neighbors(&self, g: &Graph, v: usize) -> SetMask {
        g.neighbors(v)
            .iter()
            .filter_map(|&w| self.bit_of(w))
            .fold(0, |m, b| m | (1 << b))
    }

    /// The mask of all of `X`. Requires `t <= 64`.
    pub fn full_mask(&self) -> SetMask {
        if self.t() == 64 {
            SetMask::MAX
        } else {
            (1 << self.t()) - 1
        }
    }
}

/// Splits the vertices around the cover `x`; fails if `x` is not a cover.
pub fn partition(g: &Graph, x: &[usize]) -> Result<VertexCoverPartition, VcError> {
    validate_cover(g, x)?;
    let t = x.len();
    let mut position = vec![NOT_IN_COVER; g.n()];
    for (i, &v) in x.iter().enumerate() {
        position[v] = i;
    }
    let (low, high) = (0..g.n())
        .filter(|&v| position[v] == NOT_IN_COVER)
        .partition(|&v| 2 * g.degree(v) <= t);
    Ok(VertexCoverPartition {
        cover: x.to_vec(),
        position,
        low,
        high,
    })
}

/// `|N²[x]|` for each cover vertex, in cover order.
pub fn cover_sizes(g: &Graph, part: &VertexCoverPartition) -> Vec<usize> {
    part.cover()
        .par_iter()
        .map_init(
            || BfsScratch::new(g.n()),
            |scratch, &x| scratch.counts(g, x, 2).0,
        )
        .collect()
}

/// For every `v ∈ I`, the number of cover vertices within distance 2 of `v`.
/// Indexed by vertex; cover entries are 0.
pub fn cover_to_independent_counts(g: &Graph, part: &VertexCoverPartition) -> Vec<usize> {
    let x_mask: Vec<SetMask> = part
        .cover()
        .iter()
        .map(|&y| part.cover_neighbors(g, y))
        .collect();
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            if part.in_cover(v) {
                return 0;
            }
            let reach = g.neighbors(v).iter().fold(0, |acc, &y| {
                let b = part.bit_of(y).expect("neighbours of I lie in the cover");
                acc | (1 << b) | x_mask[b]
            });
            reach.count_ones() as usize
        })
        .collect()
}

/// The two weighted families over the cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFamilies {
    /// Key `N(v)` for `v ∈ I_l`, weighted by multiplicity.
    pub low: WeightedSetFamily,
    /// Key `X \ N(u)` for `u ∈ I_h`, weighted by multiplicity.
    pub high: WeightedSetFamily,
}

pub fn build_families(g: &Graph, part: &VertexCoverPartition) -> Result<CoverFamilies, VcError> {
    let t = u32::try_from(part.t()).unwrap_or(u32::MAX);
    if t > crate::subset::MAX_UNIVERSE {
        return Err(SubsetError::UniverseTooLarge(t).into());
    }
    let full = part.full_mask();
    let low = WeightedSetFamily::build(
        part.low().iter().map(|&v| (part.cover_neighbors(g, v), 1)),
        t,
    )?;
    let high = WeightedSetFamily::build(
        part.high()
            .iter()
            .map(|&u| (full & !part.cover_neighbors(g, u), 1)),
        t,
    )?;
    Ok(CoverFamilies { low, high })
}

/// Closed 2-neighbourhood sizes through a vertex cover. Uses `hint` as the
/// cover when given, otherwise searches for a minimum one.
pub fn solve_vc(g: &Graph, hint: Option<&[usize]>) -> Result<SizesResult, VcError> {
    solve_vc_with(g, hint, VcConfig::default())
}

pub fn solve_vc_with(
    g: &Graph,
    hint: Option<&[usize]>,
    config: VcConfig,
) -> Result<SizesResult, VcError> {
    let start = Instant::now();
    let cover = find_vertex_cover_with_budget(g, hint, config.branch_budget, config.max_cover)?;
    if cover.len() > config.max_cover {
        return Err(VcError::CoverTooLarge {
            size: cover.len(),
            cap: config.max_cover,
        });
    }
    let part = partition(g, &cover)?;
    let families = build_families(g, &part)?;
    let low_table = families.low.superset_weight_table();
    let high_table = families.high.superset_weight_table();
    let n_low = part.low().len() as u64;
    let n_high = part.high().len() as u64;

    // Queries depend only on the neighbourhood mask, so answer each distinct
    // mask once.
    let low_keys: Vec<SetMask> = families.low.iter().map(|(k, _)| k).collect();
    let low_answers: HashMap<SetMask, u64> = low_keys
        .par_iter()
        .map(|&q| {
            let meets_low = intersect_weight(&families.low, &mobius_restrict(&low_table, q));
            let sees_high = n_high - high_table.get(q);
            (q, meets_low + sees_high)
        })
        .collect();
    let high_keys: Vec<SetMask> = families.high.iter().map(|(k, _)| k).collect();
    let high_answers: HashMap<SetMask, u64> = high_keys
        .par_iter()
        .map(|&q| (q, n_high + n_low - families.low.subset_weight(q)))
        .collect();

    let to_cover = cover_to_independent_counts(g, &part);
    let mut sizes = to_cover;
    for (&x, size) in part.cover().iter().zip(cover_sizes(g, &part)) {
        sizes[x] = size;
    }
    let full = part.full_mask();
    for &v in part.low() {
        let mask = part.cover_neighbors(g, v);
        let isolated = usize::from(g.degree(v) == 0);
        sizes[v] += low_answers[&mask] as usize + isolated;
    }
    for &u in part.high() {
        let key = full & !part.cover_neighbors(g, u);
        sizes[u] += high_answers[&key] as usize;
    }

    let mut result = SizesResult::new(2, Mode::Closed, sizes, Backend::Vc);
    result.parameter = Some(part.t());
    result.peak_table_entries = Some(low_table.len() + high_table.len());
    result.elapsed = start.elapsed();
    Ok(result)
}
