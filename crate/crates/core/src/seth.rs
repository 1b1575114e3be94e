//! CNF satisfiability through closed 2-neighbourhood sizes.
//!
//! The variables are split into two halves. Every assignment of the left
//! half becomes a vertex in `A`, every assignment of the right half a vertex
//! in `B`, and every clause a vertex in `C`. An assignment is joined to each
//! clause it fails to satisfy using only its own half. Two hubs `va` and `vb`
//! see `A ∪ C` and `B ∪ C` respectively and each other.
//!
//! `α ∈ A` reaches every vertex except the `β ∈ B` with which it shares no
//! unsatisfied clause, that is, the `β` for which `α ∪ β` satisfies the
//! formula. So the formula is satisfiable iff some `α` has fewer than
//! `2N + m + 2` vertices within distance 2, where `N = |A| = |B|`.
//!
//! Assignment indices are little-endian: bit `j` of `α` is the value of
//! variable `j + 1`, and bit `j` of `β` the value of variable `half + j + 1`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bfs_sizes, write_edge_list, Backend, Graph, Mode, SizesResult};
use crate::td::{solve_tw, TdError};
use crate::vc::{solve_vc, VcError};

/// Largest variable count (after padding) accepted by default.
pub const MAX_VARS: usize = 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SethError {
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<SethError>,
    },
    #[error("malformed cnf: {0}")]
    Malformed(String),
    #[error("clause {clause}: literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange {
        clause: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("clause {clause} is a tautology (contains variable {var} in both polarities)")]
    Tautology { clause: usize, var: usize },
    #[error("{vars} variables exceed the cap of {cap}")]
    TooManyVariables { vars: usize, cap: usize },
    #[error("vc backend: {0}")]
    Vc(#[from] VcError),
    #[error("tw backend: {0}")]
    Tw(#[from] TdError),
}

impl SethError {
    fn at_line(self, line: usize) -> Self {
        SethError::AtLine {
            line,
            source: Box::new(self),
        }
    }

    pub fn root(&self) -> &SethError {
        match self {
            SethError::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}

/// A formula in conjunctive normal form over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    /// Signed literals, sorted by variable, without repeats.
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    /// Validates literal ranges, rejects tautologies and drops repeated
    /// literals. Clause indices in errors are 0-based.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, SethError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (ci, mut clause) in clauses.into_iter().enumerate() {
            for &lit in &clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(SethError::LiteralOutOfRange {
                        clause: ci,
                        literal: lit,
                        num_vars,
                    });
                }
            }
            clause.sort_unstable_by_key(|&l| (l.unsigned_abs(), l));
            clause.dedup();
            if let Some(w) = clause.windows(2).find(|w| w[0] == -w[1]) {
                return Err(SethError::Tautology {
                    clause: ci,
                    var: w[0].unsigned_abs() as usize,
                });
            }
            out.push(clause);
        }
        Ok(CnfFormula {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    /// Whether the full assignment `bits` (bit `j` = variable `j + 1`)
    /// satisfies every clause.
    pub fn satisfied_by(&self, bits: u64) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| literal_true(l, bits)))
    }
}

#[inline]
fn literal_true(lit: i64, bits: u64) -> bool {
    let value = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
    value == (lit > 0)
}

/// Parses DIMACS `cnf`: `c` comments, a `p cnf <vars> <clauses>` header, and
/// 0-terminated clauses that may span lines. A `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, SethError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        let at = |e: SethError| e.at_line(lineno);
        if line.starts_with('p') {
            if header.is_some() {
                return Err(at(SethError::Malformed("second `p` header".into())));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let ["p", "cnf", n, m] = toks.as_slice() else {
                return Err(at(SethError::Malformed(format!(
                    "expected `p cnf <vars> <clauses>`, got `{line}`"
                ))));
            };
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| at(SethError::Malformed(format!("bad header count `{t}`"))))
            };
            header = Some((parse(n)?, parse(m)?));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(at(SethError::Malformed(
                "clause before `p cnf` header".into(),
            )));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| at(SethError::Malformed(format!("bad literal `{tok}`"))))?;
            if current.is_empty() {
                current_line = lineno;
            }
            if lit == 0 {
                let clause = std::mem::take(&mut current);
                CnfFormula::new(num_vars, vec![clause.clone()])
                    .map_err(|e| relabel(e, clauses.len()).at_line(current_line.max(lineno)))?;
                clauses.push(clause);
            } else {
                current.push(lit);
            }
        }
    }

    let (num_vars, declared) =
        header.ok_or_else(|| SethError::Malformed("missing `p cnf` header".into()))?;
    if !current.is_empty() {
        return Err(SethError::Malformed(format!(
            "last clause (starting line {current_line}) is not terminated by 0"
        )));
    }
    if clauses.len() != declared {
        return Err(SethError::Malformed(format!(
            "header declares {declared} clauses but {} were read",
            clauses.len()
        )));
    }
    CnfFormula::new(num_vars, clauses)
}

/// Re-numbers the clause index of a single-clause validation error.
fn relabel(e: SethError, clause: usize) -> SethError {
    match e {
        SethError::LiteralOutOfRange {
            literal, num_vars, ..
        } => SethError::LiteralOutOfRange {
            clause,
            literal,
            num_vars,
        },
        SethError::Tautology { var, .. } => SethError::Tautology { clause, var },
        other => other,
    }
}

/// Writes `phi` in DIMACS `cnf`.
pub fn write_dimacs(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.num_vars, phi.clauses.len());
    for clause in &phi.clauses {
        for lit in clause {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Uniform random `k`-CNF: each clause has `min(k, n)` distinct variables
/// with random signs.
pub fn random_cnf(num_vars: usize, clauses: usize, k: usize, seed: u64) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = k.min(num_vars);
    let out = (0..clauses)
        .map(|_| {
            let vars = rand::seq::index::sample(&mut rng, num_vars, width);
            vars.into_iter()
                .map(|v| {
                    let lit = v as i64 + 1;
                    if rng.gen::<bool>() {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(num_vars, out).expect("distinct variables cannot form a tautology")
}

/// Exhaustive satisfiability check over all `2^n` assignments.
pub fn brute_sat(phi: &CnfFormula) -> Result<bool, SethError> {
    if phi.num_vars > MAX_VARS {
        return Err(SethError::TooManyVariables {
            vars: phi.num_vars,
            cap: MAX_VARS,
        });
    }
    // (positive mask, negative mask) per clause
    let masks: Vec<(u64, u64)> = phi
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, n), &l| {
                let bit = 1u64 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    Ok((0..1u64 << phi.num_vars)
        .into_par_iter()
        .any(|a| masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0)))
}

/// The graph built from a formula, with its vertex classes.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub graph: Graph,
    /// Variable count of the input formula.
    pub num_vars: usize,
    /// Variables per half after padding to an even count.
    pub half: usize,
    pub a_range: Range<usize>,
    pub b_range: Range<usize>,
    pub c_range: Range<usize>,
    pub va: usize,
    pub vb: usize,
    /// `2N + m + 2`, the size every `α` attains when the formula is unsatisfiable.
    pub threshold: usize,
}

/// Class ranges and threshold, serialized next to the exported graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSidecar {
    pub num_vars: usize,
    pub padded_vars: usize,
    pub clauses: usize,
    pub vertices: usize,
    /// Half-open `[start, end)` vertex ranges.
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub c: [usize; 2],
    pub va: usize,
    pub vb: usize,
    pub threshold: usize,
    pub assignment_order: String,
}

impl ReductionInstance {
    /// `C ∪ {va, vb}`, a vertex cover of size `m + 2`.
    pub fn cover(&self) -> Vec<usize> {
        self.c_range.clone().chain([self.va, self.vb]).collect()
    }

    /// Left-half assignment of `α` (an index into `A`) as variable values.
    pub fn left_assignment(&self, alpha: usize) -> Vec<bool> {
        (0..self.half).map(|j| alpha >> j & 1 == 1).collect()
    }

    pub fn sidecar(&self) -> ReductionSidecar {
        ReductionSidecar {
            num_vars: self.num_vars,
            padded_vars: 2 * self.half,
            clauses: self.c_range.len(),
            vertices: self.graph.n(),
            a: [self.a_range.start, self.a_range.end],
            b: [self.b_range.start, self.b_range.end],
            c: [self.c_range.start, self.c_range.end],
            va: self.va,
            vb: self.vb,
            threshold: self.threshold,
            assignment_order: "little-endian: bit j of an A (B) index is variable j+1 (half+j+1)"
                .into(),
        }
    }

    /// Edge list and pretty JSON sidecar.
    pub fn export(&self) -> (String, String) {
        let json = serde_json::to_string_pretty(&self.sidecar()).expect("plain struct");
        (write_edge_list(&self.graph), json + "\n")
    }
}

pub fn build_reduction(phi: &CnfFormula) -> Result<ReductionInstance, SethError> {
    build_reduction_with_cap(phi, MAX_VARS)
}

/// As [`build_reduction`] with a custom cap on the padded variable count.
pub fn build_reduction_with_cap(
    phi: &CnfFormula,
    cap: usize,
) -> Result<ReductionInstance, SethError> {
    let padded = phi.num_vars + phi.num_vars % 2;
    if padded > cap || padded > 62 {
        return Err(SethError::TooManyVariables {
            vars: padded,
            cap: cap.min(62),
        });
    }
    let half = padded / 2;
    let big_n = 1usize << half;
    let m = phi.clauses.len();
    let a_range = 0..big_n;
    let b_range = big_n..2 * big_n;
    let c_range = 2 * big_n..2 * big_n + m;
    let va = 2 * big_n + m;
    let vb = va + 1;

    let mut edges = vec![(va, vb)];
    edges.extend(a_range.clone().map(|a| (va, a)));
    edges.extend(b_range.clone().map(|b| (vb, b)));
    edges.extend(c_range.clone().flat_map(|c| [(va, c), (vb, c)]));
    for (ci, clause) in phi.clauses.iter().enumerate() {
        let c = c_range.start + ci;
        // a half-assignment satisfies the clause iff one of the clause's
        // literals on its half is true
        let left: Vec<i64> = clause
            .iter()
            .copied()
            .filter(|l| l.unsigned_abs() as usize <= half)
            .collect();
        let right: Vec<i64> = clause
            .iter()
            .filter(|l| l.unsigned_abs() as usize > half)
            .map(|&l| l.signum() * (l.unsigned_abs() as i64 - half as i64))
            .collect();
        for x in 0..big_n {
            if !left.iter().any(|&l| literal_true(l, x as u64)) {
                edges.push((a_range.start + x, c));
            }
            if !right.iter().any(|&l| literal_true(l, x as u64)) {
                edges.push((b_range.start + x, c));
            }
        }
    }
    let graph = Graph::from_edges(vb + 1, edges).expect("construction yields a simple graph");
    Ok(ReductionInstance {
        graph,
        num_vars: phi.num_vars,
        half,
        a_range,
        b_range,
        c_range,
        va,
        vb,
        threshold: 2 * big_n + m + 2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatVerdict {
    pub satisfiable: bool,
    /// Index into `A` of an `α` below the threshold; any satisfying
    /// assignment agrees with it on the left half.
    pub witness: Option<usize>,
    pub min_size: usize,
    pub threshold: usize,
}

/// Closed 2-neighbourhood sizes of a reduction instance. The vc backend is
/// handed the `C ∪ {va, vb}` cover; tw uses a heuristic decomposition.
pub fn reduction_sizes(
    inst: &ReductionInstance,
    backend: Backend,
) -> Result<SizesResult, SethError> {
    Ok(match backend {
        Backend::Bfs => bfs_sizes(&inst.graph, 2, Mode::Closed),
        Backend::Vc => solve_vc(&inst.graph, Some(&inst.cover()))?,
        Backend::Tw => solve_tw(&inst.graph, None)?,
    })
}

/// Decides `phi` from the sizes computed by `backend` alone.
pub fn sat_via_sizes(phi: &CnfFormula, backend: Backend) -> Result<SatVerdict, SethError> {
    let inst = build_reduction(phi)?;
    let sizes = reduction_sizes(&inst, backend)?.sizes;
    Ok(verdict(&inst, &sizes))
}

/// Reads satisfiability off precomputed sizes.
pub fn verdict(inst: &ReductionInstance, sizes: &[usize]) -> SatVerdict {
    let (witness, min_size) = inst
        .a_range
        .clone()
        .map(|a| (a, sizes[a]))
        .min_by_key(|&(a, s)| (s, a))
        .expect("A is never empty");
    let satisfiable = min_size < inst.threshold;
    SatVerdict {
        satisfiable,
        witness: satisfiable.then_some(witness - inst.a_range.start),
        min_size,
        threshold: inst.threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vc::validate_cover;

    fn xor2() -> CnfFormula {
        parse_dimacs("p cnf 2 2\n1 2 0\n-1 -2 0").unwrap()
    }

    #[test]
    fn parse_examples() {
        let phi = xor2();
        assert_eq!(phi.num_vars(), 2);
        assert_eq!(phi.clauses(), &[vec![1, 2], vec![-1, -2]]);

        let err = parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap_err();
        assert_eq!(err.root(), &SethError::Tautology { clause: 0, var: 1 });
        assert!(matches!(err, SethError::AtLine { line: 2, .. }));

        let empty = parse_dimacs("p cnf 1 0\n").unwrap();
        assert!(empty.clauses().is_empty());
    }

    #[test]
    fn parse_details() {
        let phi = parse_dimacs("c hi\np cnf 3 2\n1 1 -2\n 3 0 -3\n0\n%\n0\n").unwrap();
        assert_eq!(phi.clauses(), &[vec![1, -2, 3], vec![-3]]);
        let err = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert!(matches!(
            err.root(),
            SethError::LiteralOutOfRange { literal: 3, .. }
        ));
        assert!(matches!(
            parse_dimacs("1 2 0\n").unwrap_err().root(),
            SethError::Malformed(_)
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 0\n"),
            Err(SethError::Malformed(_))
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(SethError::Malformed(_))
        ));
        assert!(matches!(
            parse_dimacs("p cnf x 1\n").unwrap_err().root(),
            SethError::Malformed(_)
        ));
        let phi = random_cnf(9, 20, 3, 4);
        assert_eq!(parse_dimacs(&write_dimacs(&phi)).unwrap(), phi);
    }

    #[test]
    fn brute_sat_examples() {
        assert!(brute_sat(&CnfFormula::new(3, vec![]).unwrap()).unwrap());
        assert!(!brute_sat(&CnfFormula::new(3, vec![vec![1], vec![]]).unwrap()).unwrap());
        assert!(brute_sat(&xor2()).unwrap());
        assert!(!brute_sat(&CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap()).unwrap());
        assert!(matches!(
            brute_sat(&CnfFormula::new(31, vec![]).unwrap()),
            Err(SethError::TooManyVariables { vars: 31, cap: 30 })
        ));
    }

    /// Checks every structural claim about the instance directly.
    fn check_structure(phi: &CnfFormula, inst: &ReductionInstance) {
        let g = &inst.graph;
        let big_n = inst.a_range.len();
        let m = phi.clauses().len();
        assert_eq!(inst.b_range.len(), big_n);
        assert_eq!(inst.c_range.len(), m);
        assert_eq!(g.n(), 2 * big_n + m + 2);
        assert_eq!(inst.threshold, g.n());
        for side in [&inst.a_range, &inst.b_range] {
            for x in side.clone() {
                assert!(g
                    .neighbors(x)
                    .iter()
                    .all(|w| inst.c_range.contains(w) || *w == inst.va || *w == inst.vb));
            }
        }
        let mut va_nbrs: Vec<usize> = inst.a_range.clone().chain(inst.c_range.clone()).collect();
        va_nbrs.push(inst.vb);
        assert_eq!(g.neighbors(inst.va), va_nbrs.as_slice());
        let mut vb_nbrs: Vec<usize> = inst.b_range.clone().chain(inst.c_range.clone()).collect();
        vb_nbrs.push(inst.va);
        assert_eq!(g.neighbors(inst.vb), vb_nbrs.as_slice());
        let cover = inst.cover();
        assert_eq!(cover.len(), m + 2);
        validate_cover(g, &cover).unwrap();

        // α–c adjacency against a literal-by-literal evaluation
        for alpha in 0..big_n {
            let values = inst.left_assignment(alpha);
            for (ci, clause) in phi.clauses().iter().enumerate() {
                let sat = clause.iter().any(|&l| {
                    let v = l.unsigned_abs() as usize - 1;
                    v < inst.half && values[v] == (l > 0)
                });
                assert_eq!(g.has_edge(alpha, inst.c_range.start + ci), !sat);
            }
        }
    }

    #[test]
    fn two_variable_instance() {
        let phi = xor2();
        let inst = build_reduction(&phi).unwrap();
        assert_eq!(inst.graph.n(), 8);
        assert_eq!(inst.threshold, 8);
        check_structure(&phi, &inst);
        let v = sat_via_sizes(&phi, Backend::Bfs).unwrap();
        assert!(v.satisfiable);
        // x1 = true needs x2 = false, which satisfies both clauses
        assert!(v.witness.is_some());
    }

    #[test]
    fn clause_free_instance() {
        let phi = CnfFormula::new(2, vec![]).unwrap();
        let inst = build_reduction(&phi).unwrap();
        assert_eq!(inst.graph.n(), 6);
        assert!(inst.c_range.is_empty());
        check_structure(&phi, &inst);
        // the only A–B path runs through va–vb
        assert!(inst.graph.has_edge(inst.va, inst.vb));
        assert!(sat_via_sizes(&phi, Backend::Vc).unwrap().satisfiable);
    }

    #[test]
    fn contradiction_hits_threshold_exactly() {
        let phi = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        let inst = build_reduction(&phi).unwrap();
        assert_eq!(inst.half, 1);
        check_structure(&phi, &inst);
        let sizes = bfs_sizes(&inst.graph, 2, Mode::Closed).sizes;
        for a in inst.a_range.clone() {
            assert_eq!(sizes[a], inst.threshold);
        }
        for b in Backend::ALL {
            assert!(!sat_via_sizes(&phi, b).unwrap().satisfiable, "{b}");
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        for seed in 0..30u64 {
            let n = 1 + (seed as usize % 8);
            let m = 1 + (seed as usize * 5) % 12;
            let phi = random_cnf(n, m, 3, seed);
            let expected = brute_sat(&phi).unwrap();
            let inst = build_reduction(&phi).unwrap();
            check_structure(&phi, &inst);
            for b in Backend::ALL {
                let v = sat_via_sizes(&phi, b).unwrap();
                assert_eq!(v.satisfiable, expected, "seed {seed} backend {b}");
                if let Some(alpha) = v.witness {
                    // some extension of the witness satisfies the formula
                    let ok = (0..1u64 << (2 * inst.half - inst.half))
                        .any(|beta| phi.satisfied_by(alpha as u64 | beta << inst.half));
                    assert!(ok, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn variable_cap() {
        let phi = CnfFormula::new(31, vec![vec![1]]).unwrap();
        assert_eq!(
            build_reduction(&phi).unwrap_err(),
            SethError::TooManyVariables { vars: 32, cap: 30 }
        );
        assert!(build_reduction_with_cap(&CnfFormula::new(5, vec![]).unwrap(), 4).is_err());
    }

    #[test]
    fn export_round_trip() {
        let inst = build_reduction(&xor2()).unwrap();
        let (edges, json) = inst.export();
        let g = crate::graph::parse_graph(&edges, crate::graph::GraphFormat::EdgeList).unwrap();
        assert_eq!(g, inst.graph);
        let side: ReductionSidecar = serde_json::from_str(&json).unwrap();
        assert_eq!(side, inst.sidecar());
        assert_eq!(side.threshold, 8);
    }
}
