//! In-memory representations of exchangeable arrays.
//!
//! `MultiwayArray` stores a fully observed K-way array of p-dimensional
//! observations (multiway-clustered data); `DyadicArray` stores the
//! off-diagonal n x n array of a dyadic network. Both are immutable after
//! construction and safe to share across threads read-only.

use crate::error::{Error, Result};

/// Dense K-way array of p-vectors over cluster sizes (N_1, ..., N_K).
///
/// Cells are addressed by a multi-index with one 0-based entry per axis.
/// Storage is row-major over the multi-index (last axis fastest), with the
/// p coordinates of each cell contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiwayArray {
    dims: Vec<usize>,
    p: usize,
    values: Vec<f64>,
}

impl MultiwayArray {
    pub fn new(dims: Vec<usize>, p: usize, values: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParam("need at least one axis (K >= 1)".into()));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParam("cluster sizes must be positive".into()));
        }
        if p == 0 {
            return Err(Error::InvalidParam("coordinate dimension p must be >= 1".into()));
        }
        let cells: usize = dims.iter().product();
        if values.len() != cells * p {
            return Err(Error::InvalidParam(format!(
                "value buffer has {} entries, expected {} cells x {} coords",
                values.len(),
                cells,
                p
            )));
        }
        Ok(Self { dims, p, values })
    }

    /// Constant array, mostly for tests.
    pub fn constant(dims: Vec<usize>, p: usize, value: f64) -> Result<Self> {
        let cells: usize = dims.iter().product();
        Self::new(dims, p, vec![value; cells * p])
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Total number of cells, prod_k N_k.
    pub fn num_cells(&self) -> usize {
        self.dims.iter().product()
    }

    /// Minimum cluster size n = min_k N_k.
    pub fn min_dim(&self) -> usize {
        *self.dims.iter().min().expect("K >= 1")
    }

    /// Flat cell offset for a multi-index (0-based entries).
    pub fn cell_offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        let mut off = 0usize;
        for (k, &i) in index.iter().enumerate() {
            debug_assert!(i < self.dims[k]);
            off = off * self.dims[k] + i;
        }
        off
    }

    /// The p-vector stored at a multi-index.
    pub fn cell(&self, index: &[usize]) -> &[f64] {
        let off = self.cell_offset(index) * self.p;
        &self.values[off..off + self.p]
    }

    /// Raw storage, cells in row-major multi-index order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterate cells in storage order together with their multi-index.
    pub fn iter_cells(&self) -> CellIter<'_> {
        CellIter {
            array: self,
            next: 0,
            index: vec![0; self.dims.len()],
        }
    }

    /// Relabel index values along one axis: cell (.., i, ..) of the result
    /// equals cell (.., perm[i], ..) of the input.
    pub fn permute_axis(&self, axis: usize, perm: &[usize]) -> Result<Self> {
        if axis >= self.dims.len() {
            return Err(Error::InvalidParam(format!("axis {axis} out of range")));
        }
        let n = self.dims[axis];
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidParam("not a permutation of the axis".into()));
        }
        let mut out = vec![0.0; self.values.len()];
        let mut index = vec![0usize; self.dims.len()];
        for cell in 0..self.num_cells() {
            let mut rem = cell;
            for k in (0..self.dims.len()).rev() {
                index[k] = rem % self.dims[k];
                rem /= self.dims[k];
            }
            let mut src = index.clone();
            src[axis] = perm[index[axis]];
            let s = self.cell_offset(&src) * self.p;
            let d = cell * self.p;
            out[d..d + self.p].copy_from_slice(&self.values[s..s + self.p]);
        }
        Self::new(self.dims.clone(), self.p, out)
    }

    /// Require every cluster size to be at least `min` (inference engines
    /// need N_k >= 2).
    pub fn require_min_dims(&self, min: usize) -> Result<()> {
        if let Some((k, &n)) = self.dims.iter().enumerate().find(|(_, &n)| n < min) {
            return Err(Error::InvalidParam(format!(
                "axis {} has N_{} = {} < {}",
                k,
                k + 1,
                n,
                min
            )));
        }
        Ok(())
    }
}

pub struct CellIter<'a> {
    array: &'a MultiwayArray,
    next: usize,
    index: Vec<usize>,
}

impl<'a> Iterator for CellIter<'a> {
    type Item = (Vec<usize>, &'a [f64]);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.array.num_cells() {
            return None;
        }
        let off = self.next * self.array.p;
        let item = (
            self.index.clone(),
            &self.array.values[off..off + self.array.p],
        );
        self.next += 1;
        // advance the multi-index, last axis fastest
        for k in (0..self.index.len()).rev() {
            self.index[k] += 1;
            if self.index[k] < self.array.dims[k] {
                break;
            }
            self.index[k] = 0;
        }
        Some(item)
    }
}

/// Off-diagonal n x n array of p-vectors for dyadic (network) data.
///
/// Both ordered slots (i, j) and (j, i) are stored; `symmetric` asserts
/// they hold identical values.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicArray {
    n: usize,
    p: usize,
    symmetric: bool,
    // n*(n-1) ordered pairs, row i holding the n-1 slots (i, j), j != i
    values: Vec<f64>,
}

impl DyadicArray {
    /// Build from a filler called once per ordered pair (i, j), i != j.
    pub fn from_fn(
        n: usize,
        p: usize,
        symmetric: bool,
        mut fill: impl FnMut(usize, usize, &mut [f64]),
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewUnits { need: 2, have: n });
        }
        if p == 0 {
            return Err(Error::InvalidParam("coordinate dimension p must be >= 1".into()));
        }
        let mut values = vec![0.0; n * (n - 1) * p];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let off = Self::slot(n, p, i, j);
                fill(i, j, &mut values[off..off + p]);
            }
        }
        let arr = Self {
            n,
            p,
            symmetric,
            values,
        };
        if symmetric {
            arr.check_symmetric()?;
        }
        Ok(arr)
    }

    pub fn zeros(n: usize, p: usize, symmetric: bool) -> Result<Self> {
        Self::from_fn(n, p, symmetric, |_, _, _| {})
    }

    fn slot(n: usize, p: usize, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < n && j < n);
        let col = if j < i { j } else { j - 1 };
        (i * (n - 1) + col) * p
    }

    fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.pair(i, j) != self.pair(j, i) {
                    return Err(Error::InvalidParam(format!(
                        "symmetric flag set but X({},{}) != X({},{})",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The p-vector at ordered pair (i, j), 0-based, i != j.
    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        let off = Self::slot(self.n, self.p, i, j);
        &self.values[off..off + self.p]
    }

    pub fn pair_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let off = Self::slot(self.n, self.p, i, j);
        self.symmetric = false;
        &mut self.values[off..off + self.p]
    }

    /// Mark a hand-edited array as symmetric again after checking.
    pub fn assert_symmetric(mut self) -> Result<Self> {
        self.check_symmetric()?;
        self.symmetric = true;
        Ok(self)
    }

    /// Iterate unordered pairs i < j (0-based).
    pub fn iter_unordered(&self) -> impl Iterator<Item = (usize, usize, &[f64])> {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.pair(i, j))))
    }

    /// Relabel units: pair (i, j) of the result equals pair (perm[i], perm[j])
    /// of the input.
    pub fn permute_units(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n
            || perm
                .iter()
                .any(|&i| i >= self.n || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidParam("not a permutation of the units".into()));
        }
        Self::from_fn(self.n, self.p, self.symmetric, |i, j, out| {
            out.copy_from_slice(self.pair(perm[i], perm[j]));
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiway_indexing_round_trips() {
        let dims = vec![2, 3];
        let p = 2;
        let mut vals = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                vals.push((10 * i + j) as f64);
                vals.push((10 * i + j) as f64 + 0.5);
            }
        }
        let a = MultiwayArray::new(dims, p, vals).unwrap();
        assert_eq!(a.cell(&[1, 2]), &[12.0, 12.5]);
        assert_eq!(a.iter_cells().count(), 6);
        let (idx, v) = a.iter_cells().nth(5).unwrap();
        assert_eq!(idx, vec![1, 2]);
        assert_eq!(v, &[12.0, 12.5]);
    }

    #[test]
    fn permute_axis_relabels() {
        let a = MultiwayArray::new(vec![2, 2], 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = a.permute_axis(0, &[1, 0]).unwrap();
        assert_eq!(b.cell(&[0, 0]), &[3.0]);
        assert_eq!(b.cell(&[1, 1]), &[2.0]);
        let c = b.permute_axis(0, &[1, 0]).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn dyadic_slots_are_distinct_and_diagonal_free() {
        let a = DyadicArray::from_fn(3, 1, false, |i, j, out| {
            out[0] = (10 * (i + 1) + (j + 1)) as f64;
        })
        .unwrap();
        assert_eq!(a.pair(0, 1), &[12.0]);
        assert_eq!(a.pair(1, 0), &[21.0]);
        assert_eq!(a.pair(2, 1), &[32.0]);
        assert_eq!(a.iter_unordered().count(), 3);
    }

    #[test]
    fn symmetric_flag_is_checked() {
        let r = DyadicArray::from_fn(3, 1, true, |i, j, out| {
            out[0] = (i + j) as f64; // symmetric
        });
        assert!(r.is_ok());
        let r = DyadicArray::from_fn(3, 1, true, |i, j, out| {
            out[0] = i as f64 - j as f64; // antisymmetric, not symmetric
        });
        assert!(r.is_err());
    }

    #[test]
    fn unit_permutation_round_trips() {
        let a = DyadicArray::from_fn(4, 2, false, |i, j, out| {
            out[0] = (i * 4 + j) as f64;
            out[1] = -(out[0]);
        })
        .unwrap();
        let perm = [2, 0, 3, 1];
        let mut inv = [0usize; 4];
        for (i, &pi) in perm.iter().enumerate() {
            inv[pi] = i;
        }
        let b = a.permute_units(&perm).unwrap().permute_units(&inv).unwrap();
        assert_eq!(a, b);
    }
}
