//! Thin SVDs of tall-skinny matrices.
//!
//! Two families, each with single or double orthonormalization:
//!
//! | variant | orthonormalization | reconstruction error |
//! |---|---|---|
//! | [`ts_svd_randomized`] | one TSQR | ~ working precision |
//! | [`ts_svd_randomized_double`] | two TSQRs | ~ working precision |
//! | [`ts_svd_gram`] | one Gram pass | ~ √(working precision) |
//! | [`ts_svd_gram_double`] | two Gram passes | ~ √(working precision) |
//!
//! The randomized variants first scramble the columns with a
//! [`MixingOperator`] so that unpivoted TSQR reveals rank reliably. The Gram
//! variants normalize the left singular vectors explicitly from their column
//! norms rather than trusting the eigenvalues.

use std::fmt;

use crate::config::RunConfig;
use crate::dense::{dense_svd, dense_sym_eig, gemm, Trans};
use crate::error::{invalid, Result};
use crate::matrix::{gram, left_multiply_small, BlockRowMatrix, SmallDense};
use crate::mixing::MixingOperator;
use crate::tsqr::tsqr_factor;

/// Which routine produced a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Algorithm 1: randomized, single TSQR.
    Randomized,
    /// Algorithm 2: randomized, double TSQR.
    RandomizedDouble,
    /// Algorithm 3: Gram-based, single pass.
    Gram,
    /// Algorithm 4: Gram-based, double pass.
    GramDouble,
    /// Algorithm 6: direct SVD of `QᵀA` for a given basis `Q`.
    Direct,
    /// Algorithm 7: subspace iteration on Algorithms 1/2, then direct SVD.
    LowRankRandomized,
    /// Algorithm 8: subspace iteration on Algorithms 3/4, then direct SVD.
    LowRankGram,
}

impl Algorithm {
    pub const TALL_SKINNY: [Algorithm; 4] = [
        Algorithm::Randomized,
        Algorithm::RandomizedDouble,
        Algorithm::Gram,
        Algorithm::GramDouble,
    ];

    /// Number used in benchmark tables.
    pub fn number(self) -> u8 {
        match self {
            Algorithm::Randomized => 1,
            Algorithm::RandomizedDouble => 2,
            Algorithm::Gram => 3,
            Algorithm::GramDouble => 4,
            Algorithm::Direct => 6,
            Algorithm::LowRankRandomized => 7,
            Algorithm::LowRankGram => 8,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Some(match n {
            1 => Algorithm::Randomized,
            2 => Algorithm::RandomizedDouble,
            3 => Algorithm::Gram,
            4 => Algorithm::GramDouble,
            6 => Algorithm::Direct,
            7 => Algorithm::LowRankRandomized,
            8 => Algorithm::LowRankGram,
            _ => return None,
        })
    }

    pub fn is_low_rank(self) -> bool {
        matches!(self, Algorithm::LowRankRandomized | Algorithm::LowRankGram)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// `A ≈ U diag(sigma) Vᵀ` with `r = sigma.len()` retained triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `m × r`, partitioned like the input.
    pub u: BlockRowMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// `n × r`.
    pub v: SmallDense,
    pub algorithm: Algorithm,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) Vᵀ` as a dense matrix. Only sensible at small sizes.
    pub fn to_dense_product(&self) -> SmallDense {
        let mut us = self.u.to_dense();
        us.scale_columns(&self.sigma);
        gemm(&us, Trans::No, &self.v, Trans::Yes)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.sigma.iter().all(|s| s.is_finite())
    }
}

/// Dispatches to one of the four tall-skinny routines.
pub fn ts_svd(a: &BlockRowMatrix, algorithm: Algorithm, cfg: &RunConfig) -> Result<SvdResult> {
    match algorithm {
        Algorithm::Randomized => ts_svd_randomized(a, cfg),
        Algorithm::RandomizedDouble => ts_svd_randomized_double(a, cfg),
        Algorithm::Gram => ts_svd_gram(a, cfg),
        Algorithm::GramDouble => ts_svd_gram_double(a, cfg),
        other => Err(invalid(format!(
            "algorithm {other} is not a tall-skinny factorization"
        ))),
    }
}

fn check_tall(a: &BlockRowMatrix, cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    if a.n_rows() == 0 {
        return Err(invalid("cannot factor a matrix with no rows"));
    }
    if a.n_rows() < a.n_cols() {
        return Err(invalid(format!(
            "tall-skinny SVD needs rows >= columns, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    Ok(())
}

/// Ω for the column dimension; a single column needs no mixing.
fn mixing_for(n: usize, seed: u64) -> Result<Option<MixingOperator>> {
    if n < 2 {
        Ok(None)
    } else {
        MixingOperator::build(n, seed).map(Some)
    }
}

/// `A Ωᵀ`: mixes every row of `a`, which is `(Ω Aᵀ)ᵀ`.
fn mix_rows(a: &BlockRowMatrix, omega: &Option<MixingOperator>) -> Result<BlockRowMatrix> {
    match omega {
        Some(op) => a.map_blocks(|b, _| op.apply_to_rows(b)),
        None => Ok(a.clone()),
    }
}

fn unmix(v: SmallDense, omega: &Option<MixingOperator>) -> Result<SmallDense> {
    match omega {
        Some(op) => op.apply_inverse(&v),
        None => Ok(v),
    }
}

/// Randomized thin SVD with a single TSQR (Algorithm 1).
pub fn ts_svd_randomized(a: &BlockRowMatrix, cfg: &RunConfig) -> Result<SvdResult> {
    check_tall(a, cfg)?;
    let omega = mixing_for(a.n_cols(), cfg.seed)?;
    let mixed = mix_rows(a, &omega)?;
    let qr = tsqr_factor(&mixed, cfg)?;
    let (u_small, sigma, v_mixed) = dense_svd(&qr.r_factor)?;
    let u = left_multiply_small(&qr.q, &u_small)?;
    let v = unmix(v_mixed, &omega)?;
    Ok(SvdResult {
        u,
        sigma,
        v,
        algorithm: Algorithm::Randomized,
    })
}

/// Randomized thin SVD with two TSQRs in succession (Algorithm 2).
pub fn ts_svd_randomized_double(a: &BlockRowMatrix, cfg: &RunConfig) -> Result<SvdResult> {
    check_tall(a, cfg)?;
    let omega = mixing_for(a.n_cols(), cfg.seed)?;
    let mixed = mix_rows(a, &omega)?;
    let first = tsqr_factor(&mixed, cfg)?;
    let (q, t) = if first.kept_rank == 0 {
        (first.q, first.r_factor)
    } else {
        let second = tsqr_factor(&first.q, cfg)?;
        let t = gemm(&second.r_factor, Trans::No, &first.r_factor, Trans::No);
        (second.q, t)
    };
    let (u_small, sigma, v_mixed) = dense_svd(&t)?;
    let u = left_multiply_small(&q, &u_small)?;
    let v = unmix(v_mixed, &omega)?;
    Ok(SvdResult {
        u,
        sigma,
        v,
        algorithm: Algorithm::RandomizedDouble,
    })
}

/// One Gram orthonormalization `Y = Ỹ Σ⁻¹` with `Ỹ = A V`, `AᵀA = V D Vᵀ`.
struct GramPass {
    /// Normalized columns, `m × s`.
    y: BlockRowMatrix,
    /// Column norms of `Ỹ` that survived the discard, in eigenvalue order.
    norms: Vec<f64>,
    /// Matching eigenvectors, `n × s`.
    vectors: SmallDense,
}

fn gram_pass(a: &BlockRowMatrix, working_precision: f64) -> Result<GramPass> {
    let b = gram(a);
    let (_, vectors) = dense_sym_eig(&b)?;
    let y_raw = left_multiply_small(a, &vectors)?;
    let norms = y_raw.column_norms();
    let largest = norms.iter().copied().fold(0.0, f64::max);
    let threshold = largest * working_precision.sqrt();
    let keep: Vec<usize> = norms
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != 0.0 && **s >= threshold)
        .map(|(j, _)| j)
        .collect();
    let kept_norms: Vec<f64> = keep.iter().map(|&j| norms[j]).collect();
    let inv: Vec<f64> = kept_norms.iter().map(|s| 1.0 / s).collect();
    let y = y_raw.map_blocks(|blk, _| {
        let mut sel = blk.select_columns(&keep);
        sel.scale_columns(&inv);
        Ok(sel)
    })?;
    Ok(GramPass {
        y,
        norms: kept_norms,
        vectors: vectors.select_columns(&keep),
    })
}

/// Gram-based thin SVD with explicit normalization (Algorithm 3).
pub fn ts_svd_gram(a: &BlockRowMatrix, cfg: &RunConfig) -> Result<SvdResult> {
    check_tall(a, cfg)?;
    let pass = gram_pass(a, cfg.working_precision)?;
    // Column norms need not come out in eigenvalue order.
    let mut order: Vec<usize> = (0..pass.norms.len()).collect();
    order.sort_by(|&i, &j| pass.norms[j].total_cmp(&pass.norms[i]));
    let sigma = order.iter().map(|&j| pass.norms[j]).collect();
    let u = pass.y.map_blocks(|b, _| Ok(b.select_columns(&order)))?;
    Ok(SvdResult {
        u,
        sigma,
        v: pass.vectors.select_columns(&order),
        algorithm: Algorithm::Gram,
    })
}

/// Gram-based thin SVD with two normalization passes (Algorithm 4).
pub fn ts_svd_gram_double(a: &BlockRowMatrix, cfg: &RunConfig) -> Result<SvdResult> {
    check_tall(a, cfg)?;
    let first = gram_pass(a, cfg.working_precision)?;
    let second = gram_pass(&first.y, cfg.working_precision)?;
    // R = T Wᵀ Σ̃ Ṽᵀ
    let mut sv = first.vectors.transpose();
    sv.scale_rows(&first.norms);
    let mut r = gemm(&second.vectors, Trans::Yes, &sv, Trans::No);
    r.scale_rows(&second.norms);
    let (p, sigma, v) = dense_svd(&r)?;
    let u = left_multiply_small(&second.y, &p)?;
    Ok(SvdResult {
        u,
        sigma,
        v,
        algorithm: Algorithm::GramDouble,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::orthonormality_error;
    use crate::rng::{gaussian_matrix, seeded_rng};

    fn cfg() -> RunConfig {
        RunConfig {
            block_rows: 4,
            ..RunConfig::with_seed(3)
        }
    }

    fn blocked(dense: &SmallDense, block_rows: usize) -> BlockRowMatrix {
        BlockRowMatrix::from_dense(dense, block_rows).unwrap()
    }

    fn diag_stacked(values: &[f64], rows: usize) -> SmallDense {
        let mut d = SmallDense::zeros(rows, values.len());
        for (i, &v) in values.iter().enumerate() {
            d.set(i, i, v);
        }
        d
    }

    #[test]
    fn algorithm_numbers_round_trip() {
        for n in [1u8, 2, 3, 4, 6, 7, 8] {
            assert_eq!(Algorithm::from_number(n).unwrap().number(), n);
        }
        assert!(Algorithm::from_number(5).is_none());
        assert!(ts_svd(&blocked(&SmallDense::identity(2), 1), Algorithm::LowRankGram, &cfg()).is_err());
    }

    #[test]
    fn diagonal_spectrum_randomized() {
        let a = blocked(&diag_stacked(&[3.0, 2.0, 1.0], 9), 4);
        for alg in [Algorithm::Randomized, Algorithm::RandomizedDouble] {
            let res = ts_svd(&a, alg, &cfg()).unwrap();
            for (got, want) in res.sigma.iter().zip([3.0, 2.0, 1.0]) {
                assert!((got - want).abs() <= 1e-13 * want, "{alg}: {:?}", res.sigma);
            }
        }
    }

    #[test]
    fn diagonal_spectrum_gram() {
        let a = blocked(&diag_stacked(&[2.0, 1.0], 6), 4);
        let res = ts_svd_gram(&a, &cfg()).unwrap();
        assert!((res.sigma[0] - 2.0).abs() <= 1e-15);
        assert!((res.sigma[1] - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn stacked_identity_double_variants() {
        let dense = SmallDense::eye(12, 5);
        let a = blocked(&dense, 5);
        for alg in [Algorithm::RandomizedDouble, Algorithm::GramDouble] {
            let res = ts_svd(&a, alg, &cfg()).unwrap();
            assert_eq!(res.rank(), 5);
            assert!(orthonormality_error(&res.u) <= 1e-14, "{alg}");
            // All singular values equal one, so U is only fixed up to a
            // rotation of the input's column space: rows past the identity
            // block vanish and the top block is orthogonal.
            let u = res.u.to_dense();
            assert!(u.row_range(5, 12).max_abs() <= 1e-14, "{alg}");
            let top = u.row_range(0, 5);
            assert!(orthonormality_error(&top) <= 1e-14, "{alg}");
            assert!(orthonormality_error(&top.transpose()) <= 1e-14, "{alg}");
        }
    }

    #[test]
    fn zero_matrix_yields_empty_finite_result() {
        let a = blocked(&SmallDense::zeros(7, 3), 3);
        for alg in Algorithm::TALL_SKINNY {
            let res = ts_svd(&a, alg, &cfg()).unwrap();
            assert_eq!(res.rank(), 0, "{alg}");
            assert_eq!(res.u.n_rows(), 7);
            assert_eq!(res.v.rows(), 3);
            assert!(res.is_finite());
        }
    }

    #[test]
    fn single_column_needs_no_mixing() {
        let dense = SmallDense::from_rows(&[[3.0], [4.0], [0.0]]);
        for alg in Algorithm::TALL_SKINNY {
            let res = ts_svd(&blocked(&dense, 2), alg, &cfg()).unwrap();
            assert!((res.sigma[0] - 5.0).abs() < 1e-14, "{alg}");
        }
    }

    #[test]
    fn rejects_wide_input() {
        let a = blocked(&SmallDense::zeros(2, 3), 1);
        for alg in Algorithm::TALL_SKINNY {
            assert!(ts_svd(&a, alg, &cfg()).is_err());
        }
    }

    #[test]
    fn sigma_sorted_and_v_orthonormal() {
        let dense = gaussian_matrix(40, 7, &mut seeded_rng(1, 1));
        let a = blocked(&dense, 6);
        for alg in Algorithm::TALL_SKINNY {
            let res = ts_svd(&a, alg, &cfg()).unwrap();
            assert!(res.sigma.windows(2).all(|w| w[0] >= w[1]));
            assert!(res.sigma.iter().all(|&s| s >= 0.0));
            assert!(orthonormality_error(&res.v) <= 1e-12, "{alg}");
            assert!(res.to_dense_product().max_abs_diff(&dense) <= 1e-6, "{alg}");
        }
    }
}
