//! Weighted set families over a universe of at most 64 elements and the three
//! batched weight queries over them:
//!
//! * `w_⊆(Q)`: total weight of members that contain `Q`,
//! * `w_⊇(Q)`: total weight of members contained in `Q`,
//! * `w_∩(Q)`: total weight of members that meet `Q`.
//!
//! Sets are `u64` bitmasks; element `i` is bit `i`.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

pub type SetMask = u64;

/// Largest supported universe.
pub const MAX_UNIVERSE: u32 = SetMask::BITS;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubsetError {
    #[error("universe of {0} elements exceeds the {MAX_UNIVERSE}-bit word")]
    UniverseTooLarge(u32),
    #[error("set {mask:#x} is not within a universe of {universe} elements")]
    OutOfUniverse { mask: SetMask, universe: u32 },
}

fn universe_mask(universe: u32) -> SetMask {
    if universe >= MAX_UNIVERSE {
        SetMask::MAX
    } else {
        (1 << universe) - 1
    }
}

/// All subsets of `mask`, from `mask` itself down to the empty set.
pub fn subsets(mask: SetMask) -> impl Iterator<Item = SetMask> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// Subsets of `mask` in the order of their compacted index: the `j`-th item
/// has bit `k` set iff bit `k` of `j` is set, counting `mask`'s bits from the
/// lowest.
fn compacted_subsets(mask: SetMask) -> impl Iterator<Item = SetMask> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        let succ = cur.wrapping_sub(mask) & mask;
        next = if succ == 0 { None } else { Some(succ) };
        Some(cur)
    })
}

/// A multiset of subsets of `{0, .., universe - 1}` with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSetFamily {
    universe: u32,
    entries: HashMap<SetMask, u64>,
    total_weight: u64,
    max_card: u32,
}

impl WeightedSetFamily {
    /// Builds a family, summing the weights of repeated sets and dropping any
    /// set whose total weight is zero.
    pub fn build<I>(sets: I, universe: u32) -> Result<Self, SubsetError>
    where
        I: IntoIterator<Item = (SetMask, u64)>,
    {
        if universe > MAX_UNIVERSE {
            return Err(SubsetError::UniverseTooLarge(universe));
        }
        let allowed = universe_mask(universe);
        let mut entries: HashMap<SetMask, u64> = HashMap::new();
        for (mask, weight) in sets {
            if mask & !allowed != 0 {
                return Err(SubsetError::OutOfUniverse { mask, universe });
            }
            if weight > 0 {
                *entries.entry(mask).or_default() += weight;
            }
        }
        let total_weight = entries.values().sum();
        let max_card = entries.keys().map(|k| k.count_ones()).max().unwrap_or(0);
        Ok(WeightedSetFamily {
            universe,
            entries,
            total_weight,
            max_card,
        })
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Largest member cardinality, 0 for the empty family.
    pub fn max_card(&self) -> u32 {
        self.max_card
    }

    /// Number of distinct member sets.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, set: SetMask) -> u64 {
        self.entries.get(&set).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SetMask, u64)> + '_ {
        self.entries.iter().map(|(&k, &w)| (k, w))
    }

    /// `S -> w_⊆(S)` for every `S` contained in some member. Costs one update
    /// per (member, subset of member) pair.
    pub fn superset_weight_table(&self) -> SupersetTable {
        let mut map: HashMap<SetMask, u64> = HashMap::new();
        for (&member, &w) in &self.entries {
            for s in subsets(member) {
                *map.entry(s).or_default() += w;
            }
        }
        SupersetTable { map }
    }

    /// `w_⊇(query)` by enumerating the subsets of `query`.
    pub fn subset_weight(&self, query: SetMask) -> u64 {
        subsets(query).map(|s| self.weight(s)).sum()
    }

    /// Answers every query against this family, sharing one superset table.
    pub fn batch_queries(&self, queries: &[SetMask]) -> Vec<QueryAnswer> {
        let table = self.superset_weight_table();
        queries
            .par_iter()
            .map(|&q| {
                let restricted = mobius_restrict(&table, q);
                QueryAnswer {
                    superset_weight: table.get(q),
                    subset_weight: self.subset_weight(q),
                    intersect_weight: intersect_weight(self, &restricted),
                }
            })
            .collect()
    }
}

/// Sparse `w_⊆` table; sets missing from the map have weight 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupersetTable {
    map: HashMap<SetMask, u64>,
}

impl SupersetTable {
    /// `w_⊆(set)`.
    #[inline]
    pub fn get(&self, set: SetMask) -> u64 {
        self.map.get(&set).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryAnswer {
    /// `w_⊆(Q)`
    pub superset_weight: u64,
    /// `w_⊇(Q)`
    pub subset_weight: u64,
    /// `w_∩(Q)`
    pub intersect_weight: u64,
}

/// In-place superset-sum (zeta) transform over a dense array of length `2^k`:
/// afterwards `a[S] = Σ_{T ⊇ S} a[T]`.
pub fn superset_zeta(a: &mut [u64]) {
    assert!(a.len().is_power_of_two(), "length must be a power of two");
    let mut bit = 1;
    while bit < a.len() {
        for block in a.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l = l.wrapping_add(*h);
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`superset_zeta`]: afterwards
/// `a[S] = Σ_{T ⊇ S} (-1)^{|T \ S|} a[T]`. Arithmetic wraps, so the result is
/// exact whenever the true result is non-negative and below `2^64`.
pub fn superset_mobius(a: &mut [u64]) {
    assert!(a.len().is_power_of_two(), "length must be a power of two");
    let mut bit = 1;
    while bit < a.len() {
        for block in a.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l = l.wrapping_sub(*h);
            }
        }
        bit <<= 1;
    }
}

/// `w_Q(S)` for every `S ⊆ Q`: the weight of members whose intersection with
/// `Q` is exactly `S`. The result is indexed by compacted position (bit `k` of
/// the index is the `k`-th lowest element of `Q`).
pub fn mobius_restrict(table: &SupersetTable, query: SetMask) -> Vec<u64> {
    let mut dense: Vec<u64> = compacted_subsets(query).map(|s| table.get(s)).collect();
    superset_mobius(&mut dense);
    dense
}

/// `w_∩(Q)` from the restricted table of `Q`: everything except the members
/// disjoint from `Q`.
pub fn intersect_weight(family: &WeightedSetFamily, restricted: &[u64]) -> u64 {
    family.total_weight() - restricted[0]
}
