//! Tall-skinny QR over a reduction tree.
//!
//! Each block is factored with Householder QR; the triangular factors are
//! stacked pairwise and re-factored up the same fixed tree that
//! [`crate::matrix::tree_reduce`] uses. The orthogonal factor is then pushed
//! back down the tree, so `Q` inherits the stability of Householder
//! reflections at every level and never involves `R⁻¹`.
//!
//! Rank deficiency is handled once at the root: a row of `R` is discarded
//! when its diagonal entry is zero or below `R₁₁ · working_precision`, and
//! the matching column of `Q` goes with it.

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dense::{gemm, householder_qr, Trans};
use crate::error::{invalid, Result};
use crate::matrix::{BlockRowMatrix, SmallDense};

/// Output of [`tsqr_factor`].
#[derive(Debug, Clone)]
pub struct QrResult {
    /// `m × r` with orthonormal columns, partitioned like the input.
    pub q: BlockRowMatrix,
    /// The `r` retained rows of the root `R` (`r × n`).
    pub r_factor: SmallDense,
    pub kept_rank: usize,
    /// Diagonal of the root `R` before discarding, all nonnegative.
    pub root_diagonal: Vec<f64>,
    /// Indices (into `root_diagonal`) of the retained rows.
    pub kept: Vec<usize>,
}

/// How a node of one tree level was formed from the level below.
enum Link {
    /// Two children merged; `q` is the thin Q of the stacked pair and the
    /// first `split` rows belong to the left child.
    Pair { q: SmallDense, split: usize },
    /// Odd child passed through unchanged.
    Carry,
}

/// Indices `j` whose diagonal entry survives the discard rule.
pub(crate) fn retained_diagonal(diag: &[f64], working_precision: f64) -> Vec<usize> {
    let Some(&first) = diag.first() else {
        return Vec::new();
    };
    let threshold = first.abs() * working_precision;
    diag.iter()
        .enumerate()
        .filter(|(_, d)| **d != 0.0 && d.abs() >= threshold)
        .map(|(j, _)| j)
        .collect()
}

/// Computes `a = Q R` with the tree method and discards numerically zero
/// rows of `R` together with the matching columns of `Q`.
pub fn tsqr_factor(a: &BlockRowMatrix, cfg: &RunConfig) -> Result<QrResult> {
    cfg.validate()?;
    if a.n_rows() == 0 {
        return Err(invalid("TSQR of a matrix with no rows"));
    }
    if a.n_rows() < a.n_cols() {
        return Err(invalid(format!(
            "TSQR needs a tall matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }

    let leaves: Vec<(SmallDense, SmallDense)> =
        a.blocks().par_iter().map(householder_qr).collect();
    let (leaf_q, mut rs): (Vec<SmallDense>, Vec<SmallDense>) = leaves.into_iter().unzip();

    let mut levels: Vec<Vec<Link>> = Vec::new();
    while rs.len() > 1 {
        let mut pairs = Vec::with_capacity(rs.len() / 2);
        let mut carry = None;
        let mut it = rs.into_iter();
        while let Some(left) = it.next() {
            match it.next() {
                Some(right) => pairs.push((left, right)),
                None => carry = Some(left),
            }
        }
        let merged: Vec<(Link, SmallDense)> = pairs
            .into_par_iter()
            .map(|(l, r)| {
                let (q, rr) = householder_qr(&SmallDense::vstack(&l, &r));
                (Link::Pair { q, split: l.rows() }, rr)
            })
            .collect();
        let (mut links, mut next): (Vec<Link>, Vec<SmallDense>) = merged.into_iter().unzip();
        if let Some(c) = carry {
            links.push(Link::Carry);
            next.push(c);
        }
        levels.push(links);
        rs = next;
    }
    let root = rs.pop().expect("at least one block");

    let k = root.rows();
    let root_diagonal: Vec<f64> = (0..k).map(|j| root.get(j, j)).collect();
    let kept = retained_diagonal(&root_diagonal, cfg.working_precision);
    let r_factor = root.select_rows(&kept);

    // Coefficients expressing the kept Q columns in each node's local basis.
    let mut coeffs = vec![SmallDense::eye(k, k).select_columns(&kept)];
    for links in levels.iter().rev() {
        let expanded: Vec<Vec<SmallDense>> = links
            .par_iter()
            .zip(coeffs.par_iter())
            .map(|(link, c)| match link {
                Link::Pair { q, split } => vec![
                    gemm(&q.row_range(0, *split), Trans::No, c, Trans::No),
                    gemm(&q.row_range(*split, q.rows()), Trans::No, c, Trans::No),
                ],
                Link::Carry => vec![c.clone()],
            })
            .collect();
        coeffs = expanded.into_iter().flatten().collect();
    }
    debug_assert_eq!(coeffs.len(), leaf_q.len());

    let q_blocks: Vec<SmallDense> = leaf_q
        .par_iter()
        .zip(coeffs.par_iter())
        .map(|(q, c)| gemm(q, Trans::No, c, Trans::No))
        .collect();
    let q = BlockRowMatrix::from_blocks(q_blocks, kept.len(), a.block_rows())?;

    Ok(QrResult {
        q,
        r_factor,
        kept_rank: kept.len(),
        root_diagonal,
        kept,
    })
}
