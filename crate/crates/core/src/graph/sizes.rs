use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `N^r[v]`: every vertex at distance at most `r`, including `v`.
    Closed,
    /// `N^r(v)`: every vertex at distance exactly `r`.
    Open,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Closed => "closed",
            Mode::Open => "open",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(Mode::Closed),
            "open" => Ok(Mode::Open),
            other => Err(format!("unknown mode `{other}` (expected closed|open)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Bfs,
    Vc,
    Tw,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Bfs, Backend::Vc, Backend::Tw];
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Bfs => "bfs",
            Backend::Vc => "vc",
            Backend::Tw => "tw",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs" => Ok(Backend::Bfs),
            "vc" => Ok(Backend::Vc),
            "tw" => Ok(Backend::Tw),
            other => Err(format!("unknown backend `{other}` (expected bfs|vc|tw)")),
        }
    }
}

/// Per-vertex neighbourhood sizes produced by one backend run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizesResult {
    pub r: usize,
    pub mode: Mode,
    /// Indexed by vertex.
    pub sizes: Vec<usize>,
    pub backend: Backend,
    pub elapsed: Duration,
    /// Cover size for `vc`, decomposition width for `tw`.
    pub parameter: Option<usize>,
    /// Largest number of table entries held at once (`vc`, `tw`).
    pub peak_table_entries: Option<usize>,
}

impl SizesResult {
    pub fn new(r: usize, mode: Mode, sizes: Vec<usize>, backend: Backend) -> Self {
        SizesResult {
            r,
            mode,
            sizes,
            backend,
            elapsed: Duration::ZERO,
            parameter: None,
            peak_table_entries: None,
        }
    }

    /// Closed radius-0 sizes: every vertex sees only itself.
    pub fn radius_zero(n: usize) -> Self {
        SizesResult::new(0, Mode::Closed, vec![1; n], Backend::Bfs)
    }

    /// Hex SHA-256 prefix over the little-endian sizes vector.
    pub fn checksum(&self) -> String {
        checksum(&self.sizes)
    }
}

pub fn checksum(sizes: &[usize]) -> String {
    let mut hasher = Sha256::new();
    for &s in sizes {
        hasher.update((s as u64).to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}
