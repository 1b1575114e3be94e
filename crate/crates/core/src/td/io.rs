//! PACE `.td` reading and writing.
//!
//! ```text
//! c comment
//! s td <bags> <width+1> <vertices>
//! b <bag id> <vertex>...
//! <bag id> <bag id>
//! ```
//! Bag ids and vertices are 1-indexed in the file and 0-indexed in memory.

use std::fmt::Write as _;

use super::{TdError, TreeDecomposition};

fn parse_num(tok: &str) -> Result<usize, TdError> {
    tok.parse()
        .map_err(|_| TdError::Malformed(format!("expected a non-negative integer, got `{tok}`")))
}

fn one_based(tok: &str, what: &str) -> Result<usize, TdError> {
    match parse_num(tok)? {
        0 => Err(TdError::Malformed(format!(
            "{what} index 0 in a 1-indexed file"
        ))),
        x => Ok(x - 1),
    }
}

struct Header {
    bags: usize,
    declared_bag_size: usize,
    vertices: usize,
}

pub fn parse_td(text: &str) -> Result<TreeDecomposition, TdError> {
    let mut header: Option<Header> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let at = |e: TdError| e.at_line(lineno);

        if toks[0] == "s" {
            if header.is_some() {
                return Err(at(TdError::Malformed("second `s` header".into())));
            }
            let ["s", "td", b, w, n] = toks.as_slice() else {
                return Err(at(TdError::Malformed(format!(
                    "expected `s td <bags> <width+1> <vertices>`, got `{line}`"
                ))));
            };
            let h = Header {
                bags: parse_num(b).map_err(at)?,
                declared_bag_size: parse_num(w).map_err(at)?,
                vertices: parse_num(n).map_err(at)?,
            };
            bags = vec![None; h.bags];
            header = Some(h);
            continue;
        }

        let Some(h) = header.as_ref() else {
            return Err(at(TdError::Malformed(
                "content before `s td` header".into(),
            )));
        };

        if toks[0] == "b" {
            if toks.len() < 2 {
                return Err(at(TdError::Malformed("bag line without an id".into())));
            }
            let id = one_based(toks[1], "bag").map_err(at)?;
            if id >= h.bags {
                return Err(at(TdError::BagOutOfRange {
                    bag: id,
                    bags: h.bags,
                }));
            }
            let mut bag = Vec::with_capacity(toks.len() - 2);
            for tok in &toks[2..] {
                let v = one_based(tok, "vertex").map_err(at)?;
                if v >= h.vertices {
                    return Err(at(TdError::VertexOutOfRange {
                        vertex: v,
                        n: h.vertices,
                    }));
                }
                bag.push(v);
            }
            if bags[id].replace(bag).is_some() {
                return Err(at(TdError::Malformed(format!(
                    "bag {} listed twice",
                    id + 1
                ))));
            }
            continue;
        }

        let [a, b] = toks.as_slice() else {
            return Err(at(TdError::Malformed(format!(
                "expected a tree edge `<bag> <bag>`, got `{line}`"
            ))));
        };
        let a = one_based(a, "bag").map_err(at)?;
        let b = one_based(b, "bag").map_err(at)?;
        for x in [a, b] {
            if x >= h.bags {
                return Err(at(TdError::BagOutOfRange {
                    bag: x,
                    bags: h.bags,
                }));
            }
        }
        edges.push((a, b));
    }

    let h = header.ok_or_else(|| TdError::Malformed("missing `s td` header".into()))?;
    let bags: Vec<Vec<usize>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| TdError::Malformed(format!("bag {} never listed", i + 1))))
        .collect::<Result<_, _>>()?;

    let td = TreeDecomposition::new(bags, edges);
    let actual = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    if actual != h.declared_bag_size {
        log::warn!(
            "header declares bag size {} but the largest bag has {}; using width {}",
            h.declared_bag_size,
            actual,
            td.width()
        );
    }
    Ok(td)
}

/// Writes `td` for a graph on `n` vertices.
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    let max_bag = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(out, "s td {} {} {}", td.bags.len(), max_bag, n);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for &v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}
