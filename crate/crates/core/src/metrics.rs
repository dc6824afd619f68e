//! Error measures for computed factorizations and run timing.
//!
//! The reconstruction error `‖A − UΣVᵀ‖₂` is estimated with the power method
//! on `MᵀM`, `M = A − UΣVᵀ`, applying `M` implicitly so it is never formed.
//! The estimate is a Rayleigh quotient and therefore a lower bound on the
//! true norm that increases with every iteration.

use std::time::Instant;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dense::{gemm, Trans};
use crate::error::{invalid, structure, Result};
use crate::matrix::{gram, tree_reduce, BlockRowMatrix, SmallDense};
use crate::rng::{seeded_rng, standard_normals, stream};
use crate::ts_svd::SvdResult;

/// Seed for the power-method start vector, shared by every algorithm so
/// their errors are measured identically.
pub const METRIC_SEED: u64 = 0x005E_ED0F_E220;

/// One row of a benchmark table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Estimate of `‖A − UΣVᵀ‖₂`.
    pub reconstruction: f64,
    /// `max |UᵀU − I|`.
    pub left_ortho: f64,
    /// `max |VᵀV − I|`.
    pub right_ortho: f64,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
}

impl ErrorReport {
    pub fn is_finite(&self) -> bool {
        [
            self.reconstruction,
            self.left_ortho,
            self.right_ortho,
            self.cpu_seconds,
            self.wall_seconds,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Measures `result` against `a`, attaching externally captured timings.
    pub fn measure(
        a: &BlockRowMatrix,
        result: &SvdResult,
        run: &RunConfig,
        cpu_seconds: f64,
        wall_seconds: f64,
    ) -> Result<Self> {
        Ok(Self {
            reconstruction: spectral_norm_residual(a, result, run.power_iters, METRIC_SEED)?,
            left_ortho: orthonormality_error(&result.u),
            right_ortho: orthonormality_error(&result.v),
            cpu_seconds,
            wall_seconds,
        })
    }
}

/// Matrices whose column Gram matrix `XᵀX` can be formed.
pub trait ColumnGram {
    fn column_gram(&self) -> SmallDense;
}

impl ColumnGram for SmallDense {
    fn column_gram(&self) -> SmallDense {
        gemm(self, Trans::Yes, self, Trans::No)
    }
}

impl ColumnGram for BlockRowMatrix {
    fn column_gram(&self) -> SmallDense {
        gram(self)
    }
}

/// `max |XᵀX − I|` over all entries; zero for a matrix without columns.
pub fn orthonormality_error<X: ColumnGram + ?Sized>(x: &X) -> f64 {
    let g = x.column_gram();
    let mut worst = 0.0f64;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g.get(i, j) - target).abs());
        }
    }
    worst
}

fn column(values: &[f64]) -> SmallDense {
    SmallDense::from_fn(values.len(), 1, |i, _| values[i])
}

fn norm(x: &SmallDense) -> f64 {
    x.frobenius_norm()
}

/// Power-method estimate of `‖A − U diag(σ) Vᵀ‖₂` after `iters` iterations.
pub fn spectral_norm_residual(
    a: &BlockRowMatrix,
    result: &SvdResult,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    if iters == 0 {
        return Err(invalid("power method needs at least one iteration"));
    }
    let r = result.sigma.len();
    if result.u.n_cols() != r || result.v.cols() != r {
        return Err(invalid(format!(
            "factor widths disagree: U has {}, sigma {r}, V {}",
            result.u.n_cols(),
            result.v.cols()
        )));
    }
    if result.v.rows() != a.n_cols() {
        return Err(invalid(format!(
            "V has {} rows but A has {} columns",
            result.v.rows(),
            a.n_cols()
        )));
    }
    if !a.same_partition(&result.u) {
        return Err(structure("U is not partitioned like A"));
    }
    let n = a.n_cols();
    if n == 0 || a.n_rows() == 0 {
        return Ok(0.0);
    }

    let mut x = column(&standard_normals(n, &mut seeded_rng(seed, stream::POWER_METHOD)));
    let nx = norm(&x);
    x.scale_columns(&[1.0 / nx]);

    let sigma = &result.sigma;
    let mut estimate = 0.0;
    for _ in 0..iters {
        // y = A x − U (Σ Vᵀ x), block by block.
        let mut w = gemm(&result.v, Trans::Yes, &x, Trans::No);
        w.scale_rows(sigma);
        let y: Vec<SmallDense> = a
            .blocks()
            .par_iter()
            .zip(result.u.blocks().par_iter())
            .map(|(ab, ub)| {
                let mut yb = gemm(ab, Trans::No, &x, Trans::No);
                let corr = gemm(ub, Trans::No, &w, Trans::No);
                for (p, q) in yb.data_mut().iter_mut().zip(corr.data()) {
                    *p -= q;
                }
                yb
            })
            .collect();
        estimate = y.iter().map(|b| b.column_sq_norms()[0]).sum::<f64>().sqrt();

        // z = Aᵀ y − V (Σ Uᵀ y), with the block sums merged by the tree.
        let parts: Vec<(SmallDense, SmallDense)> = a
            .blocks()
            .par_iter()
            .zip(result.u.blocks().par_iter())
            .zip(y.par_iter())
            .map(|((ab, ub), yb)| {
                (
                    gemm(ab, Trans::Yes, yb, Trans::No),
                    gemm(ub, Trans::Yes, yb, Trans::No),
                )
            })
            .collect();
        let (aty, mut uty) = tree_reduce(parts, |(mut a1, mut u1), (a2, u2)| {
            a1.add_assign(&a2);
            u1.add_assign(&u2);
            (a1, u1)
        })?;
        uty.scale_rows(sigma);
        let mut z = aty;
        let corr = gemm(&result.v, Trans::No, &uty, Trans::No);
        for (p, q) in z.data_mut().iter_mut().zip(corr.data()) {
            *p -= q;
        }
        let nz = norm(&z);
        if nz == 0.0 || !nz.is_finite() {
            break;
        }
        z.scale_columns(&[1.0 / nz]);
        x = z;
    }
    Ok(estimate)
}

/// CPU time consumed by the whole process (all threads), in seconds.
pub fn process_cpu_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: clock_gettime only writes into the provided timespec.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Runs `task`, returning its output with `(cpu_seconds, wall_seconds)`.
///
/// CPU time is summed over all worker threads, so it exceeds wall time when
/// work runs in parallel.
pub fn time_run<T>(task: impl FnOnce() -> T) -> (T, f64, f64) {
    let cpu0 = process_cpu_seconds();
    let wall0 = Instant::now();
    let out = task();
    let wall = wall0.elapsed().as_secs_f64();
    let cpu = (process_cpu_seconds() - cpu0).max(0.0);
    (out, cpu, wall)
}
