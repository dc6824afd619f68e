//! Block-row partitioned matrices and the map/reduce primitives every
//! factorization is written against.
//!
//! A [`BlockRowMatrix`] is a tall matrix held as an ordered list of row
//! slabs, each slab standing in for the data owned by one executor. Work on
//! slabs runs in parallel through rayon; anything that combines slabs goes
//! through [`tree_reduce`], whose fixed pairing order makes every result
//! independent of scheduling.

use rayon::prelude::*;

use crate::dense::{gemm, Trans};
use crate::error::{invalid, structure, Result};

/// Dense row-major matrix small enough for a single owner.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallDense {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl SmallDense {
    /// Wraps row-major `data`, rejecting wrong lengths and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self { data, rows, cols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::eye(n, n)
    }

    /// The leading `cols` columns of the `rows × rows` identity.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            out.set(i, i, 1.0);
        }
        out
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { data, rows, cols }
    }

    /// Builds from a list of equally long rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            data,
            rows: rows.len(),
            cols,
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut out = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            out.set(i, i, v);
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Matrix product, checking inner dimensions.
    pub fn matmul(&self, rhs: &SmallDense) -> Result<SmallDense> {
        if self.cols != rhs.rows {
            return Err(invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(gemm(self, Trans::No, rhs, Trans::No))
    }

    /// `selfᵀ · rhs`.
    pub fn t_matmul(&self, rhs: &SmallDense) -> Result<SmallDense> {
        if self.rows != rhs.rows {
            return Err(invalid(format!(
                "cannot form transpose product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(gemm(self, Trans::Yes, rhs, Trans::No))
    }

    pub fn select_columns(&self, keep: &[usize]) -> Self {
        Self::from_fn(self.rows, keep.len(), |i, j| self.get(i, keep[j]))
    }

    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &i in keep {
            data.extend_from_slice(self.row(i));
        }
        Self {
            data,
            rows: keep.len(),
            cols: self.cols,
        }
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        Self {
            data: self.data[start * self.cols..end * self.cols].to_vec(),
            rows: end - start,
            cols: self.cols,
        }
    }

    /// Stacks `top` over `bottom`; both must share a column count.
    pub fn vstack(top: &SmallDense, bottom: &SmallDense) -> Self {
        assert_eq!(top.cols, bottom.cols, "vstack width mismatch");
        let mut data = Vec::with_capacity(top.data.len() + bottom.data.len());
        data.extend_from_slice(&top.data);
        data.extend_from_slice(&bottom.data);
        Self {
            data,
            rows: top.rows + bottom.rows,
            cols: top.cols,
        }
    }

    /// Multiplies column `j` by `scale[j]`.
    pub fn scale_columns(&mut self, scale: &[f64]) {
        assert_eq!(scale.len(), self.cols);
        if self.cols == 0 {
            return;
        }
        for row in self.data.chunks_exact_mut(self.cols) {
            for (x, s) in row.iter_mut().zip(scale) {
                *x *= s;
            }
        }
    }

    /// Multiplies row `i` by `scale[i]`.
    pub fn scale_rows(&mut self, scale: &[f64]) {
        assert_eq!(scale.len(), self.rows);
        for (i, &s) in scale.iter().enumerate() {
            for x in self.row_mut(i) {
                *x *= s;
            }
        }
    }

    /// Sum of squares of each column.
    pub fn column_sq_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        if self.cols == 0 {
            return out;
        }
        for row in self.data.chunks_exact(self.cols) {
            for (acc, x) in out.iter_mut().zip(row) {
                *acc += x * x;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest entrywise absolute difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &SmallDense) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Entrywise `self += other`.
    pub fn add_assign(&mut self, other: &SmallDense) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Replaces a square matrix with `(B + Bᵀ)/2`.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, avg);
                self.set(j, i, avg);
            }
        }
    }
}

/// Tall matrix stored as an ordered sequence of row blocks.
///
/// Every block has the full column count; block `i` starts at global row
/// `row_offsets[i]`. All blocks except possibly the last hold exactly
/// `block_rows` rows when built through [`BlockRowMatrix::from_dense`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRowMatrix {
    blocks: Vec<SmallDense>,
    row_offsets: Vec<usize>,
    n_rows: usize,
    n_cols: usize,
    block_rows: usize,
}

impl BlockRowMatrix {
    /// Assembles a matrix from row blocks taken in order.
    ///
    /// `block_rows` records the nominal partition size; blocks may be shorter.
    /// Zero-height blocks are rejected so that offsets are strictly increasing.
    pub fn from_blocks(blocks: Vec<SmallDense>, n_cols: usize, block_rows: usize) -> Result<Self> {
        if block_rows == 0 {
            return Err(invalid("block_rows must be at least 1"));
        }
        let mut row_offsets = Vec::with_capacity(blocks.len());
        let mut n_rows = 0;
        for (i, b) in blocks.iter().enumerate() {
            if b.cols() != n_cols {
                return Err(structure(format!(
                    "block {i} has {} columns, expected {n_cols}",
                    b.cols()
                )));
            }
            if b.rows() == 0 {
                return Err(structure(format!("block {i} is empty")));
            }
            row_offsets.push(n_rows);
            n_rows += b.rows();
        }
        Ok(Self {
            blocks,
            row_offsets,
            n_rows,
            n_cols,
            block_rows,
        })
    }

    /// Splits a dense matrix into blocks of `block_rows` rows.
    pub fn from_dense(a: &SmallDense, block_rows: usize) -> Result<Self> {
        if block_rows == 0 {
            return Err(invalid("block_rows must be at least 1"));
        }
        let blocks = (0..a.rows())
            .step_by(block_rows)
            .map(|start| a.row_range(start, (start + block_rows).min(a.rows())))
            .collect();
        Self::from_blocks(blocks, a.cols(), block_rows)
    }

    /// Builds an `n_rows × n_cols` matrix block by block from a generator
    /// receiving `(first_row, height)`.
    pub fn from_block_fn<F>(n_rows: usize, n_cols: usize, block_rows: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> SmallDense + Sync,
    {
        if block_rows == 0 {
            return Err(invalid("block_rows must be at least 1"));
        }
        let starts: Vec<usize> = (0..n_rows).step_by(block_rows).collect();
        let blocks = starts
            .par_iter()
            .map(|&s| f(s, block_rows.min(n_rows - s)))
            .collect();
        Self::from_blocks(blocks, n_cols, block_rows)
    }

    /// Concatenates the blocks back into one dense matrix.
    pub fn to_dense(&self) -> SmallDense {
        let mut data = Vec::with_capacity(self.n_rows * self.n_cols);
        for b in &self.blocks {
            data.extend_from_slice(b.data());
        }
        SmallDense {
            data,
            rows: self.n_rows,
            cols: self.n_cols,
        }
    }

    /// Same entries, split with a different block size.
    pub fn repartition(&self, block_rows: usize) -> Result<Self> {
        Self::from_dense(&self.to_dense(), block_rows)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn blocks(&self) -> &[SmallDense] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn into_blocks(self) -> Vec<SmallDense> {
        self.blocks
    }

    /// Whether `other` is split at exactly the same rows.
    pub fn same_partition(&self, other: &BlockRowMatrix) -> bool {
        self.n_rows == other.n_rows
            && self.row_offsets == other.row_offsets
            && self.blocks.len() == other.blocks.len()
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(SmallDense::is_finite)
    }

    /// Applies `f(block, row_offset)` to every block concurrently.
    ///
    /// Outputs must keep each block's height and agree on one width.
    pub fn map_blocks<F>(&self, f: F) -> Result<BlockRowMatrix>
    where
        F: Fn(&SmallDense, usize) -> Result<SmallDense> + Sync,
    {
        let out: Vec<SmallDense> = self
            .blocks
            .par_iter()
            .zip(self.row_offsets.par_iter())
            .map(|(b, &off)| f(b, off))
            .collect::<Result<_>>()?;
        let width = match out.first() {
            Some(b) => b.cols(),
            None => self.n_cols,
        };
        for (i, (o, b)) in out.iter().zip(&self.blocks).enumerate() {
            if o.rows() != b.rows() {
                return Err(structure(format!(
                    "block {i} changed height from {} to {}",
                    b.rows(),
                    o.rows()
                )));
            }
            if o.cols() != width {
                return Err(structure(format!(
                    "block {i} mapped to width {}, expected {width}",
                    o.cols()
                )));
            }
        }
        Ok(BlockRowMatrix {
            blocks: out,
            row_offsets: self.row_offsets.clone(),
            n_rows: self.n_rows,
            n_cols: width,
            block_rows: self.block_rows,
        })
    }

    /// Reduces a per-block quantity with [`tree_reduce`].
    pub fn map_reduce<T, M, C>(&self, map: M, combine: C) -> Result<T>
    where
        T: Send,
        M: Fn(&SmallDense, usize) -> T + Sync,
        C: Fn(T, T) -> T + Sync,
    {
        let parts: Vec<T> = self
            .blocks
            .par_iter()
            .zip(self.row_offsets.par_iter())
            .map(|(b, &off)| map(b, off))
            .collect();
        tree_reduce(parts, combine)
    }

    /// Per-column Euclidean norms.
    pub fn column_norms(&self) -> Vec<f64> {
        let n = self.n_cols;
        let sq = self
            .map_reduce(
                |b, _| b.column_sq_norms(),
                |mut x, y| {
                    for (a, b) in x.iter_mut().zip(&y) {
                        *a += b;
                    }
                    x
                },
            )
            .unwrap_or_else(|_| vec![0.0; n]);
        sq.into_iter().map(f64::sqrt).collect()
    }
}

/// Combines `parts` pairwise, level by level, in a fixed binary tree.
///
/// At each level parts `2k` and `2k+1` are merged (left operand first); an
/// unpaired trailing part is carried to the next level unchanged. The tree
/// depends only on `parts.len()`, so results are reproducible bit for bit.
pub fn tree_reduce<T, F>(parts: Vec<T>, combine: F) -> Result<T>
where
    T: Send,
    F: Fn(T, T) -> T + Sync,
{
    if parts.is_empty() {
        return Err(invalid("tree_reduce needs at least one part"));
    }
    let mut level = parts;
    while level.len() > 1 {
        let mut pairs = Vec::with_capacity(level.len() / 2);
        let mut carry = None;
        let mut it = level.into_iter();
        while let Some(left) = it.next() {
            match it.next() {
                Some(right) => pairs.push((left, right)),
                None => carry = Some(left),
            }
        }
        let mut next: Vec<T> = pairs
            .into_par_iter()
            .map(|(l, r)| combine(l, r))
            .collect();
        next.extend(carry);
        level = next;
    }
    Ok(level.pop().expect("non-empty level"))
}

/// `a · g` for a tall `a` and a small `g`, block by block.
pub fn left_multiply_small(a: &BlockRowMatrix, g: &SmallDense) -> Result<BlockRowMatrix> {
    if g.rows() != a.n_cols() {
        return Err(invalid(format!(
            "cannot multiply {}x{} by {}x{}",
            a.n_rows(),
            a.n_cols(),
            g.rows(),
            g.cols()
        )));
    }
    a.map_blocks(|b, _| Ok(gemm(b, Trans::No, g, Trans::No)))
}

/// Gram matrix `aᵀa`, summed over blocks by [`tree_reduce`] and then
/// symmetrized as `(B + Bᵀ)/2`.
pub fn gram(a: &BlockRowMatrix) -> SmallDense {
    let n = a.n_cols();
    if a.num_blocks() == 0 {
        return SmallDense::zeros(n, n);
    }
    let mut b = a
        .map_reduce(
            |blk, _| gemm(blk, Trans::Yes, blk, Trans::No),
            |mut x, y| {
                x.add_assign(&y);
                x
            },
        )
        .expect("at least one block");
    b.symmetrize();
    b
}

/// `aᵀq` for two co-partitioned tall matrices.
pub fn adjoint_times(a: &BlockRowMatrix, q: &BlockRowMatrix) -> Result<SmallDense> {
    if !a.same_partition(q) {
        return Err(structure(format!(
            "operands are not co-partitioned ({} rows in {} blocks vs {} rows in {} blocks)",
            a.n_rows(),
            a.num_blocks(),
            q.n_rows(),
            q.num_blocks()
        )));
    }
    if a.num_blocks() == 0 {
        return Ok(SmallDense::zeros(a.n_cols(), q.n_cols()));
    }
    let parts: Vec<SmallDense> = a
        .blocks()
        .par_iter()
        .zip(q.blocks().par_iter())
        .map(|(x, y)| gemm(x, Trans::Yes, y, Trans::No))
        .collect();
    tree_reduce(parts, |mut x, y| {
        x.add_assign(&y);
        x
    })
}
