//! CSV ingestion and emission for multiway arrays and dyadic edge lists.
//!
//! Formats are UTF-8, comma-separated, with an optional header row detected
//! by a non-numeric first token. Multiway rows are K index columns followed
//! by p value columns; edge rows are two id columns and one weight column.
//! Indices are 1-based on disk and 0-based in memory; this module is the
//! boundary.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::array::{DyadicArray, MultiwayArray};
use crate::error::{Error, Result};

/// Edge rows as read from disk, plus the id -> {1..n} relabeling used to
/// build the dyadic array.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub rows: Vec<(String, String, f64)>,
    /// id -> 0-based unit index, assigned in order of first appearance
    pub index_of: HashMap<String, usize>,
    /// 0-based unit index -> id (inverse of `index_of`)
    pub id_of: Vec<String>,
}

impl EdgeList {
    pub fn n(&self) -> usize {
        self.id_of.len()
    }
}

fn split_line(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::NonNumeric {
        line,
        token: token.to_string(),
    })
}

/// Lines with content and 1-based line numbers; the first line is dropped
/// as a header when `is_header` says so.
fn data_lines(text: &str, is_header: impl Fn(&[&str]) -> bool) -> Vec<(usize, &str)> {
    let mut out: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if let Some(&(_, first)) = out.first() {
        if is_header(&split_line(first)) {
            out.remove(0);
        }
    }
    out
}

/// Parse a complete K-way grid: each row is i_1,...,i_K,x^1,...,x^p with
/// 1-based indices. Dimensions are inferred from the maximum index per
/// axis; every cell of the inferred grid must be present exactly once.
pub fn load_multiway_csv(text: &str, k: usize, p: usize) -> Result<MultiwayArray> {
    if k == 0 || p == 0 {
        return Err(Error::InvalidParam("need K >= 1 and p >= 1".into()));
    }
    // header detected by a non-numeric first token (index columns are
    // always numeric in data rows)
    let lines = data_lines(text, |fields| fields[0].parse::<f64>().is_err());
    let mut rows: Vec<(usize, Vec<usize>, Vec<f64>)> = Vec::with_capacity(lines.len());
    let mut dims = vec![0usize; k];
    for (line_no, line) in lines {
        let fields = split_line(line);
        if fields.len() != k + p {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: k + p,
                found: fields.len(),
            });
        }
        let mut index = Vec::with_capacity(k);
        for f in &fields[..k] {
            let raw = parse_f64(f, line_no)?;
            if raw.fract() != 0.0 || raw < 1.0 {
                return Err(Error::NonNumeric {
                    line: line_no,
                    token: f.to_string(),
                });
            }
            index.push(raw as usize); // 1-based for now
        }
        let mut vals = Vec::with_capacity(p);
        for f in &fields[k..] {
            vals.push(parse_f64(f, line_no)?);
        }
        for (axis, &i) in index.iter().enumerate() {
            dims[axis] = dims[axis].max(i);
        }
        rows.push((line_no, index, vals));
    }
    if rows.is_empty() {
        return Err(Error::InvalidParam("no data rows".into()));
    }
    let cells: usize = dims.iter().product();
    let mut values = vec![f64::NAN; cells * p];
    let mut filled = vec![false; cells];
    let arr_shape = MultiwayArray::constant(dims.clone(), 1, 0.0)?; // offset helper
    for (line_no, index, vals) in rows {
        let zero_based: Vec<usize> = index.iter().map(|&i| i - 1).collect();
        let off = arr_shape.cell_offset(&zero_based);
        if filled[off] {
            return Err(Error::DuplicateIndex {
                line: line_no,
                index,
            });
        }
        filled[off] = true;
        values[off * p..(off + 1) * p].copy_from_slice(&vals);
    }
    if let Some(off) = filled.iter().position(|&f| !f) {
        // recover the 1-based multi-index of the first missing cell
        let mut rem = off;
        let mut idx = vec![0usize; k];
        for axis in (0..k).rev() {
            idx[axis] = rem % dims[axis] + 1;
            rem /= dims[axis];
        }
        return Err(Error::MissingCell { index: idx });
    }
    MultiwayArray::new(dims, p, values)
}

/// 17-significant-digit float formatting; round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Emit a multiway array in the same format `load_multiway_csv` reads.
pub fn write_multiway_csv(a: &MultiwayArray) -> String {
    let mut out = String::new();
    for (index, cell) in a.iter_cells() {
        let mut first = true;
        for i in index {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{}", i + 1);
        }
        for v in cell {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Parse an edge list (id_i, id_j, weight) into a scalar dyadic array.
///
/// Units are relabeled to 1..n in order of first appearance. Pairs with no
/// row are filled with exactly 0.0 (the point-mass-at-zero convention for
/// absent flows). With `symmetrize`, each unordered pair holds the sum of
/// its two directed weights on both ordered slots and the result carries
/// the symmetric flag.
pub fn load_dyadic_edges(text: &str, symmetrize: bool) -> Result<(DyadicArray, EdgeList)> {
    // ids are arbitrary tokens, so the header test keys on the weight
    // column instead of the first token
    let lines = data_lines(text, |fields| {
        fields.len() == 3 && fields[2].parse::<f64>().is_err()
    });
    let mut rows: Vec<(String, String, f64)> = Vec::with_capacity(lines.len());
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut id_of: Vec<String> = Vec::new();
    let mut seen_pairs: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(lines.len());
    for (line_no, line) in lines {
        let fields = split_line(line);
        if fields.len() != 3 {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: 3,
                found: fields.len(),
            });
        }
        let (from, to) = (fields[0].to_string(), fields[1].to_string());
        if from == to {
            return Err(Error::SelfLoop { line: line_no, id: from });
        }
        let w = parse_f64(fields[2], line_no)?;
        let mut unit = |id: &str| -> usize {
            *index_of.entry(id.to_string()).or_insert_with(|| {
                id_of.push(id.to_string());
                id_of.len() - 1
            })
        };
        let (i, j) = (unit(&from), unit(&to));
        if seen_pairs.insert((i, j), line_no).is_some() {
            return Err(Error::DuplicateEdge {
                line: line_no,
                from,
                to,
            });
        }
        edges.push((i, j, w));
        rows.push((from, to, w));
    }
    let n = id_of.len();
    if n < 2 {
        return Err(Error::TooFewUnits { need: 2, have: n });
    }
    let mut arr = DyadicArray::zeros(n, 1, false)?;
    if symmetrize {
        for &(i, j, w) in &edges {
            arr.pair_mut(i, j)[0] += w;
            arr.pair_mut(j, i)[0] += w;
        }
        arr = arr.assert_symmetric()?;
    } else {
        for &(i, j, w) in &edges {
            arr.pair_mut(i, j)[0] = w;
        }
    }
    Ok((
        arr,
        EdgeList {
            rows,
            index_of,
            id_of,
        },
    ))
}
