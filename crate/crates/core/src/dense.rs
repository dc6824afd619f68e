//! Dense kernels over [`SmallDense`]: products, thin SVD, symmetric
//! eigendecomposition and Householder QR.
//!
//! The heavy lifting is delegated to `faer`; this module owns the contracts
//! (ordering, clamping, finiteness checks) that the factorizations rely on.

use faer::linalg::matmul::matmul;
use faer::{Accum, MatMut, MatRef, Side};

use crate::error::{invalid, Error, Result};
use crate::householder;
use crate::matrix::SmallDense;

pub(crate) fn view(a: &SmallDense) -> MatRef<'_, f64> {
    MatRef::from_row_major_slice(a.data(), a.rows(), a.cols())
}

pub(crate) fn view_mut(a: &mut SmallDense) -> MatMut<'_, f64> {
    let (rows, cols) = (a.rows(), a.cols());
    MatMut::from_row_major_slice_mut(a.data_mut(), rows, cols)
}

pub(crate) fn from_faer(m: MatRef<'_, f64>) -> SmallDense {
    SmallDense::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Which operand enters the product transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Trans {
    No,
    Yes,
}

/// `op(a) · op(b)` into a fresh row-major matrix.
pub(crate) fn gemm(a: &SmallDense, ta: Trans, b: &SmallDense, tb: Trans) -> SmallDense {
    let lhs = match ta {
        Trans::No => view(a),
        Trans::Yes => view(a).transpose(),
    };
    let rhs = match tb {
        Trans::No => view(b),
        Trans::Yes => view(b).transpose(),
    };
    assert_eq!(lhs.ncols(), rhs.nrows(), "gemm inner dimension mismatch");
    let mut out = SmallDense::zeros(lhs.nrows(), rhs.ncols());
    if lhs.ncols() > 0 && !out.is_empty() {
        matmul(
            view_mut(&mut out),
            Accum::Replace,
            lhs,
            rhs,
            1.0,
            faer::get_global_parallelism(),
        );
    }
    out
}

/// Thin singular value decomposition `b = U diag(sigma) Vᵀ`.
///
/// With `k = min(rows, cols)`, `U` is `rows × k` and `V` is `cols × k`;
/// `sigma` is nonnegative and sorted in nonincreasing order.
pub fn dense_svd(b: &SmallDense) -> Result<(SmallDense, Vec<f64>, SmallDense)> {
    if !b.is_finite() {
        return Err(Error::NonFinite("dense_svd input"));
    }
    let k = b.rows().min(b.cols());
    if k == 0 {
        return Ok((
            SmallDense::zeros(b.rows(), 0),
            Vec::new(),
            SmallDense::zeros(b.cols(), 0),
        ));
    }
    let svd = view(b)
        .thin_svd()
        .map_err(|e| Error::Kernel(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector();
    let sigma: Vec<f64> = (0..k).map(|i| s[i].max(0.0)).collect();
    let u = from_faer(svd.U());
    let v = from_faer(svd.V());
    debug_assert!(sigma.windows(2).all(|w| w[0] >= w[1]));
    Ok((u, sigma, v))
}

/// Eigendecomposition of a symmetric matrix, eigenvalues in nonincreasing
/// order with negative values clamped to zero.
///
/// Only the lower triangle is read. The clamp is meant for Gram matrices,
/// which are positive semidefinite up to roundoff.
pub fn dense_sym_eig(b: &SmallDense) -> Result<(Vec<f64>, SmallDense)> {
    if b.rows() != b.cols() {
        return Err(invalid(format!(
            "symmetric eigendecomposition needs a square matrix, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    if !b.is_finite() {
        return Err(Error::NonFinite("dense_sym_eig input"));
    }
    let n = b.rows();
    if n == 0 {
        return Ok((Vec::new(), SmallDense::zeros(0, 0)));
    }
    let evd = view(b)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Kernel(format!("eigendecomposition: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    // faer returns ascending order; flip.
    let values: Vec<f64> = (0..n).map(|i| s[n - 1 - i].max(0.0)).collect();
    let vectors = SmallDense::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok((values, vectors))
}

/// Householder QR with an explicit thin `Q` and a nonnegative diagonal in `R`.
///
/// For an `h × n` input with `k = min(h, n)`, returns `Q` (`h × k`) and the
/// upper trapezoidal `R` (`k × n`).
pub(crate) fn householder_qr(a: &SmallDense) -> (SmallDense, SmallDense) {
    let k = a.rows().min(a.cols());
    if k == 0 {
        return (SmallDense::zeros(a.rows(), 0), SmallDense::zeros(0, a.cols()));
    }
    let (qq, rr) = householder::qr(view(a).to_owned());
    let mut q = from_faer(qq.as_ref());
    let mut r = from_faer(rr.as_ref());
    for j in 0..k {
        if r.get(j, j) < 0.0 {
            for x in r.row_mut(j) {
                *x = -*x;
            }
            for i in 0..q.rows() {
                q.set(i, j, -q.get(i, j));
            }
        }
    }
    (q, r)
}
