//! Blocked Householder QR in compact WY form.
//!
//! faer's own QR skips the reflector for any column whose trailing norm is
//! below a size-dependent multiple of machine epsilon. On rank-deficient
//! input that perturbs the factorization by far more than roundoff, so the
//! reflectors here are always applied (LAPACK `geqrf` conventions).

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef};

const PANEL: usize = 32;

fn stable_norm(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * x.iter().map(|v| (v / scale) * (v / scale)).sum::<f64>().sqrt()
}

/// Turns `x` into `beta` followed by the tail of the reflector vector
/// (implicit leading one) and returns `tau`; `tau == 0` means identity.
fn make_reflector(x: &mut [f64]) -> f64 {
    let Some((head, tail)) = x.split_first_mut() else {
        return 0.0;
    };
    let tail_norm = stable_norm(tail);
    if tail_norm == 0.0 {
        return 0.0;
    }
    let alpha = *head;
    let beta = -alpha.signum() * alpha.hypot(tail_norm);
    let scale = 1.0 / (alpha - beta);
    for t in tail.iter_mut() {
        *t *= scale;
    }
    *head = beta;
    (beta - alpha) / beta
}

/// `y ← (I − τ v vᵀ) y` with `v = [1, v_tail]`.
fn apply_reflector(tau: f64, v_tail: &[f64], y: &mut [f64]) {
    let (y0, y_tail) = y.split_first_mut().expect("nonempty column");
    let w = *y0 + v_tail.iter().zip(y_tail.iter()).map(|(a, b)| a * b).sum::<f64>();
    let tw = tau * w;
    *y0 -= tw;
    for (yt, vt) in y_tail.iter_mut().zip(v_tail) {
        *yt -= tw * vt;
    }
}

/// One factored panel: explicit unit-lower `V` and the triangular `T` with
/// `H_p ⋯ H_{p+b−1} = I − V T Vᵀ`.
struct Panel {
    start: usize,
    v: Mat<f64>,
    t: Mat<f64>,
}

fn mul(lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(lhs.nrows(), rhs.ncols());
    if lhs.ncols() > 0 {
        matmul(out.as_mut(), Accum::Replace, lhs, rhs, 1.0, faer::get_global_parallelism());
    }
    out
}

fn factor_panel(a: &mut Mat<f64>, start: usize, width: usize) -> Panel {
    let h = a.nrows();
    let mut taus = Vec::with_capacity(width);
    for j in start..start + width {
        let tau = make_reflector(&mut a.col_as_slice_mut(j)[j..]);
        taus.push(tau);
        if tau == 0.0 {
            continue;
        }
        let v_tail: Vec<f64> = a.col_as_slice(j)[j + 1..].to_vec();
        for c in j + 1..start + width {
            apply_reflector(tau, &v_tail, &mut a.col_as_slice_mut(c)[j..]);
        }
    }

    let v = Mat::from_fn(h - start, width, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Less => 0.0,
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Greater => a[(start + r, start + c)],
    });
    let mut t = Mat::<f64>::zeros(width, width);
    for i in 0..width {
        t[(i, i)] = taus[i];
        if i == 0 || taus[i] == 0.0 {
            continue;
        }
        let z: Vec<f64> = (0..i)
            .map(|r| (i..h - start).map(|row| v[(row, r)] * v[(row, i)]).sum())
            .collect();
        for r in 0..i {
            let s: f64 = (r..i).map(|c| t[(r, c)] * z[c]).sum();
            t[(r, i)] = -taus[i] * s;
        }
    }
    Panel { start, v, t }
}

/// Householder QR of an `h × n` column-major matrix. Returns the thin `Q`
/// (`h × k`) and the upper trapezoidal `R` (`k × n`), `k = min(h, n)`.
/// The diagonal of `R` may have either sign.
pub(crate) fn qr(mut a: Mat<f64>) -> (Mat<f64>, Mat<f64>) {
    let (h, n) = (a.nrows(), a.ncols());
    let k = h.min(n);
    let mut panels = Vec::with_capacity(k.div_ceil(PANEL));
    let mut start = 0;
    while start < k {
        let width = PANEL.min(k - start);
        let panel = factor_panel(&mut a, start, width);
        let trail = n - start - width;
        if trail > 0 {
            let w = mul(
                panel.v.as_ref().transpose(),
                a.as_ref().submatrix(start, start + width, h - start, trail),
            );
            let w = mul(panel.t.as_ref().transpose(), w.as_ref());
            matmul(
                a.as_mut().submatrix_mut(start, start + width, h - start, trail),
                Accum::Add,
                panel.v.as_ref(),
                w.as_ref(),
                -1.0,
                faer::get_global_parallelism(),
            );
        }
        panels.push(panel);
        start += width;
    }

    let r = Mat::from_fn(k, n, |i, j| if j >= i { a[(i, j)] } else { 0.0 });
    let mut q = Mat::<f64>::zeros(h, k);
    for i in 0..k {
        q[(i, i)] = 1.0;
    }
    for panel in panels.iter().rev() {
        let p = panel.start;
        let w = mul(
            panel.v.as_ref().transpose(),
            q.as_ref().submatrix(p, p, h - p, k - p),
        );
        let w = mul(panel.t.as_ref(), w.as_ref());
        matmul(
            q.as_mut().submatrix_mut(p, p, h - p, k - p),
            Accum::Add,
            panel.v.as_ref(),
            w.as_ref(),
            -1.0,
            faer::get_global_parallelism(),
        );
    }
    (q, r)
}
