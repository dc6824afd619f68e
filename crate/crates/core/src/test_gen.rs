//! Test matrices `A = U Σ Vᵀ` with cosine-transform singular vectors and
//! prescribed spectra.
//!
//! `U` and `V` are orthonormal DCT-II matrices of sizes `m` and `n`. Only
//! the first `k` singular values can be nonzero, so each block is generated
//! as `U[rows, :k] · diag(σ) · V[:, :k]ᵀ` without ever forming `U`.

use crate::config::RunConfig;
use crate::dense::{gemm, Trans};
use crate::error::{invalid, Result};
use crate::matrix::{BlockRowMatrix, SmallDense};

/// Shape of the prescribed singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    /// `σⱼ = exp((j−1)/(k−1) · ln 10⁻²⁰)`, from 1 down to 10⁻²⁰.
    ExpDecay,
    /// Devil's staircase: piecewise constant with many repeated values.
    Staircase,
}

/// A spectrum with `k` potentially nonzero singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpectrumSpec {
    kind: SpectrumKind,
    k: usize,
}

impl SpectrumSpec {
    pub fn new(kind: SpectrumKind, k: usize) -> Result<Self> {
        let min = match kind {
            SpectrumKind::ExpDecay => 2,
            SpectrumKind::Staircase => 1,
        };
        if k < min {
            return Err(invalid(format!("{kind:?} spectrum needs k >= {min}, got {k}")));
        }
        Ok(Self { kind, k })
    }

    pub fn exp_decay(k: usize) -> Result<Self> {
        Self::new(SpectrumKind::ExpDecay, k)
    }

    pub fn staircase(k: usize) -> Result<Self> {
        Self::new(SpectrumKind::Staircase, k)
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Staircase value for index `j` of `k`, before sorting.
///
/// The grid point `j·8⁶/k` is computed in single precision and rounded half
/// up, its octal digits 1–7 become binary ones, and the resulting 6-bit
/// fraction is rescaled onto `[0, 1]`.
fn staircase_point(j: usize, k: usize) -> f64 {
    let quotient = (j as f32 * 262_144.0f32) / k as f32;
    let mut q = (f64::from(quotient) + 0.5).floor() as u64;
    let mut bits = 0u64;
    let mut place = 1u64;
    loop {
        if !q.is_multiple_of(8) {
            bits += place;
        }
        q /= 8;
        place *= 2;
        if q == 0 {
            break;
        }
    }
    bits as f64 / 64.0 / (1.0 - 2f64.powi(-6))
}

/// The `k` singular values of `spec`, in nonincreasing order.
pub fn spectrum_values(spec: &SpectrumSpec) -> Vec<f64> {
    let k = spec.k;
    match spec.kind {
        SpectrumKind::ExpDecay => {
            let ln_floor = 1e-20f64.ln();
            (0..k)
                .map(|j| ((j as f64 / (k - 1) as f64) * ln_floor).exp())
                .collect()
        }
        SpectrumKind::Staircase => {
            let mut v: Vec<f64> = (0..k).map(|j| staircase_point(j, k)).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        }
    }
}

/// `σ_{l+1}`, the spectral-norm error of the best rank-`l` approximation;
/// zero once `l` reaches `k`.
pub fn exact_optimal_error(spec: &SpectrumSpec, l: usize) -> f64 {
    if l >= spec.k {
        0.0
    } else {
        spectrum_values(spec)[l]
    }
}

/// Entry `(row, col)` of the orthonormal DCT-II matrix of size `dim`,
/// where `col` indexes frequency.
#[inline]
fn dct_entry(dim: usize, row: usize, col: usize) -> f64 {
    if col == 0 {
        (1.0 / dim as f64).sqrt()
    } else {
        let t = ((2 * row + 1) * col) % (4 * dim);
        (2.0 / dim as f64).sqrt() * (std::f64::consts::PI * t as f64 / (2 * dim) as f64).cos()
    }
}

/// Rows `start..start+height` and columns `0..cols` of the DCT-II matrix of
/// size `dim`.
pub fn cosine_factor(dim: usize, start: usize, height: usize, cols: usize) -> SmallDense {
    SmallDense::from_fn(height, cols, |i, j| dct_entry(dim, start + i, j))
}

/// Builds the `m × n` test matrix with spectrum `spec`, partitioned by
/// `run.block_rows`. Entries do not depend on the partitioning.
pub fn generate_test_matrix(
    m: usize,
    n: usize,
    spec: &SpectrumSpec,
    run: &RunConfig,
) -> Result<BlockRowMatrix> {
    run.validate()?;
    if n == 0 || m < n {
        return Err(invalid(format!("test matrix needs m >= n >= 1, got {m}x{n}")));
    }
    let k = spec.k;
    if k > n {
        return Err(invalid(format!("spectrum has {k} values but only {n} columns")));
    }
    let sigma = spectrum_values(spec);
    // Σ Vᵀ restricted to the first k rows.
    let mut right = cosine_factor(n, 0, n, k).transpose();
    right.scale_rows(&sigma);
    BlockRowMatrix::from_block_fn(m, n, run.block_rows, |start, height| {
        gemm(&cosine_factor(m, start, height, k), Trans::No, &right, Trans::No)
    })
}
