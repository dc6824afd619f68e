//! Thin SVDs of tall-skinny matrices and randomized low-rank approximation
//! over a block-row partitioned matrix model.
//!
//! The partitioned model ([`BlockRowMatrix`]) simulates distributed
//! execution on one host: per-block work runs in parallel and results are
//! merged through a fixed-shape reduction tree. On top of it the crate offers
//!
//! - [`tsqr`]: communication-avoiding QR with a rank-discard rule,
//! - [`ts_svd`]: randomized (TSQR-based) and Gram-based thin SVDs, each with
//!   single or double orthonormalization,
//! - [`low_rank`]: randomized subspace iteration feeding a direct SVD,
//! - [`test_gen`] and [`metrics`]: the test matrices and error measures used
//!   to benchmark all of the above.

pub mod config;
pub mod dense;
pub mod error;
mod householder;
pub mod low_rank;
pub mod matrix;
pub mod metrics;
pub mod mixing;
pub mod rng;
pub mod test_gen;
pub mod ts_svd;
pub mod tsqr;

pub use config::RunConfig;
pub use dense::{dense_svd, dense_sym_eig};
pub use error::{Error, Result};
pub use low_rank::{
    direct_svd, low_rank_gram, low_rank_randomized, subspace_iteration, InnerMethod,
    SubspaceIterConfig,
};
pub use matrix::{adjoint_times, gram, left_multiply_small, tree_reduce, BlockRowMatrix, SmallDense};
pub use metrics::{orthonormality_error, spectral_norm_residual, time_run, ErrorReport};
pub use mixing::MixingOperator;
pub use test_gen::{exact_optimal_error, generate_test_matrix, spectrum_values, SpectrumKind, SpectrumSpec};
pub use ts_svd::{Algorithm, SvdResult};
pub use tsqr::{tsqr_factor, QrResult};
