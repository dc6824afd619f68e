//! Low-rank approximation of arbitrary (tall or square) matrices.
//!
//! [`subspace_iteration`] finds an orthonormal basis `Q` whose range tracks
//! the dominant left singular subspace; [`direct_svd`] turns `Q` into an SVD
//! of `QQᵀA`. Every orthonormalization inside the iteration is one of the
//! tall-skinny SVDs, used as `Q = U` (with `R = ΣVᵀ`); the intermediate ones
//! only track a subspace and run once, while the last one runs twice.

use crate::config::RunConfig;
use crate::dense::dense_svd;
use crate::error::{invalid, structure, Result};
use crate::matrix::{adjoint_times, left_multiply_small, BlockRowMatrix};
use crate::rng::{derive_seed, gaussian_matrix, seeded_rng, stream};
use crate::ts_svd::{ts_svd, Algorithm, SvdResult};

/// Tall-skinny factorization family used inside the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMethod {
    /// Algorithm 1 while tracking, Algorithm 2 for the final basis.
    Randomized,
    /// Algorithm 3 while tracking, Algorithm 4 for the final basis.
    Gram,
}

impl InnerMethod {
    fn single(self) -> Algorithm {
        match self {
            InnerMethod::Randomized => Algorithm::Randomized,
            InnerMethod::Gram => Algorithm::Gram,
        }
    }

    fn double(self) -> Algorithm {
        match self {
            InnerMethod::Randomized => Algorithm::RandomizedDouble,
            InnerMethod::Gram => Algorithm::GramDouble,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceIterConfig {
    /// Width of the sketch; `0 < l < min(m, n)`.
    pub l: usize,
    /// Number of `A`/`Aᵀ` round trips before the final product.
    pub iterations: usize,
    pub inner: InnerMethod,
    /// Seed of the Gaussian start matrix.
    pub seed: u64,
}

/// Orthonormal `m × r` basis (`r ≤ l`) approximating the range of `a`.
pub fn subspace_iteration(
    a: &BlockRowMatrix,
    cfg: &SubspaceIterConfig,
    run: &RunConfig,
) -> Result<BlockRowMatrix> {
    run.validate()?;
    let (m, n) = (a.n_rows(), a.n_cols());
    if cfg.l == 0 || cfg.l >= m.min(n) {
        return Err(invalid(format!(
            "sketch width must satisfy 0 < l < min(m, n) = {}, got {}",
            m.min(n),
            cfg.l
        )));
    }

    let mut factorizations = 0u64;
    let mut factor = |y: &BlockRowMatrix, alg: Algorithm| {
        let step_run = RunConfig {
            seed: derive_seed(run.seed, factorizations),
            ..*run
        };
        factorizations += 1;
        ts_svd(y, alg, &step_run)
    };

    let mut start = gaussian_matrix(n, cfg.l, &mut seeded_rng(cfg.seed, stream::GAUSSIAN_START));
    for _ in 0..cfg.iterations {
        let y = left_multiply_small(a, &start)?;
        let q = factor(&y, cfg.inner.single())?.u;
        let y_adj = adjoint_times(a, &q)?;
        let y_adj = BlockRowMatrix::from_dense(&y_adj, run.block_rows)?;
        start = factor(&y_adj, cfg.inner.single())?.u.to_dense();
    }
    let y = left_multiply_small(a, &start)?;
    Ok(factor(&y, cfg.inner.double())?.u)
}

/// SVD of `QQᵀA` from `B = QᵀA = Ũ Σ Vᵀ` and `U = Q Ũ` (Algorithm 6).
///
/// `q` must have orthonormal columns and share `a`'s row partitioning.
pub fn direct_svd(a: &BlockRowMatrix, q: &BlockRowMatrix, run: &RunConfig) -> Result<SvdResult> {
    run.validate()?;
    if !a.same_partition(q) {
        return Err(structure("basis and matrix are not co-partitioned"));
    }
    let b = adjoint_times(q, a)?;
    let (u_small, sigma, v) = dense_svd(&b)?;
    let u = left_multiply_small(q, &u_small)?;
    Ok(SvdResult {
        u,
        sigma,
        v,
        algorithm: Algorithm::Direct,
    })
}

fn pipeline(
    a: &BlockRowMatrix,
    l: usize,
    iterations: usize,
    inner: InnerMethod,
    run: &RunConfig,
    tag: Algorithm,
) -> Result<SvdResult> {
    let cfg = SubspaceIterConfig {
        l,
        iterations,
        inner,
        seed: run.seed,
    };
    let q = subspace_iteration(a, &cfg, run)?;
    let mut res = direct_svd(a, &q, run)?;
    res.algorithm = tag;
    Ok(res)
}

/// Rank-`l` approximation through randomized TSQR-based iteration
/// (Algorithm 7).
pub fn low_rank_randomized(
    a: &BlockRowMatrix,
    l: usize,
    iterations: usize,
    run: &RunConfig,
) -> Result<SvdResult> {
    pipeline(a, l, iterations, InnerMethod::Randomized, run, Algorithm::LowRankRandomized)
}

/// Rank-`l` approximation through Gram-based iteration (Algorithm 8).
pub fn low_rank_gram(
    a: &BlockRowMatrix,
    l: usize,
    iterations: usize,
    run: &RunConfig,
) -> Result<SvdResult> {
    pipeline(a, l, iterations, InnerMethod::Gram, run, Algorithm::LowRankGram)
}
