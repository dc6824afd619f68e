//! Independent reference implementations used as test oracles. Nothing
//! here calls into the library's numerical kernels.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsvd_core::{BlockRowMatrix, SmallDense};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform entries in `[-1, 1)`.
pub fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> SmallDense {
    SmallDense::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn matmul(a: &SmallDense, b: &SmallDense) -> SmallDense {
    assert_eq!(a.cols(), b.rows());
    SmallDense::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|p| a.get(i, p) * b.get(p, j)).sum()
    })
}

pub fn transpose(a: &SmallDense) -> SmallDense {
    SmallDense::from_fn(a.cols(), a.rows(), |i, j| a.get(j, i))
}

pub fn sub(a: &SmallDense, b: &SmallDense) -> SmallDense {
    SmallDense::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) - b.get(i, j))
}

pub fn max_abs(a: &SmallDense) -> f64 {
    a.data().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `U diag(s) Vᵀ`.
pub fn compose(u: &SmallDense, s: &[f64], v: &SmallDense) -> SmallDense {
    SmallDense::from_fn(u.rows(), v.rows(), |i, j| {
        (0..s.len()).map(|p| u.get(i, p) * s[p] * v.get(j, p)).sum()
    })
}

/// Random matrix with orthonormal columns via modified Gram-Schmidt (twice).
pub fn orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> SmallDense {
    let mut cs: Vec<Vec<f64>> = (0..cols)
        .map(|_| (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    for j in 0..cols {
        for _ in 0..2 {
            for p in 0..j {
                let d: f64 = (0..rows).map(|i| cs[p][i] * cs[j][i]).sum();
                for i in 0..rows {
                    cs[j][i] -= d * cs[p][i];
                }
            }
            let n = cs[j].iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut cs[j] {
                *x /= n;
            }
        }
    }
    SmallDense::from_fn(rows, cols, |i, j| cs[j][i])
}

/// Matrix with the prescribed singular values.
pub fn with_spectrum(rows: usize, cols: usize, sigma: &[f64], rng: &mut ChaCha8Rng) -> SmallDense {
    let u = orthonormal(rows, sigma.len(), rng);
    let v = orthonormal(cols, sigma.len(), rng);
    compose(&u, sigma, &v)
}

/// One-sided Jacobi SVD: returns `(U, σ, V)` with σ descending.
pub fn jacobi_svd(a: &SmallDense) -> (SmallDense, Vec<f64>, SmallDense) {
    if a.rows() < a.cols() {
        let (u, s, v) = jacobi_svd(&transpose(a));
        return (v, s, u);
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[p][i], w[q][i]);
                    w[p][i] = c * x - s * y;
                    w[q][i] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[p][i], v[q][i]);
                    v[p][i] = c * x - s * y;
                    v[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = w.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = SmallDense::from_fn(m, n, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 {
            w[j][i] / norms[j]
        } else {
            0.0
        }
    });
    let vv = SmallDense::from_fn(n, n, |i, k| v[order[k]][i]);
    (u, sigma, vv)
}

pub fn singular_values(a: &SmallDense) -> Vec<f64> {
    jacobi_svd(a).1
}

/// Spectral norm via the Jacobi oracle.
pub fn norm2(a: &SmallDense) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Numerical rank from Householder QR with column pivoting.
pub fn pivoted_qr_rank(a: &SmallDense, tol: f64) -> usize {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut diag = Vec::new();
    for k in 0..m.min(n) {
        let best = (k..n)
            .max_by(|&x, &y| {
                let nx: f64 = cols[x][k..].iter().map(|v| v * v).sum();
                let ny: f64 = cols[y][k..].iter().map(|v| v * v).sum();
                nx.total_cmp(&ny)
            })
            .unwrap();
        cols.swap(k, best);
        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        diag.push(norm);
        if norm == 0.0 {
            break;
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x * x).sum();
        for col in cols.iter_mut().skip(k) {
            let d: f64 = v.iter().zip(&col[k..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * d / vn;
            for (c, x) in col[k..].iter_mut().zip(&v) {
                *c -= f * x;
            }
        }
    }
    let first = diag.first().copied().unwrap_or(0.0);
    diag.iter().filter(|&&d| d > tol * first).count()
}

/// Q with orthonormal columns from unpivoted Householder QR.
pub fn householder_q(a: &SmallDense) -> SmallDense {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut vs = Vec::new();
    for k in 0..n {
        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x * x).sum();
        if vn > 0.0 {
            for col in cols.iter_mut().skip(k) {
                let d: f64 = v.iter().zip(&col[k..]).map(|(x, y)| x * y).sum();
                let f = 2.0 * d / vn;
                for (c, x) in col[k..].iter_mut().zip(&v) {
                    *c -= f * x;
                }
            }
        }
        vs.push((v, vn));
    }
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for (k, (v, vn)) in vs.iter().enumerate().rev() {
        if *vn == 0.0 {
            continue;
        }
        for col in q.iter_mut() {
            let d: f64 = v.iter().zip(&col[k..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * d / vn;
            for (c, x) in col[k..].iter_mut().zip(v) {
                *c -= f * x;
            }
        }
    }
    SmallDense::from_fn(m, n, |i, j| q[j][i])
}

/// Literal port of the printed staircase snippet: single-precision quotient,
/// round half up, octal string, digits 1-7 replaced by 1, parsed as binary.
pub fn staircase_oracle(k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|j| {
            let q: f32 = j as f32 * 8f64.powi(6) as f32 / k as f32;
            let rounded = (q as f64 + 0.5).floor() as i64;
            let octal = format!("{rounded:o}");
            let binary: String = octal
                .chars()
                .map(|c| if ('1'..='7').contains(&c) { '1' } else { c })
                .collect();
            i64::from_str_radix(&binary, 2).unwrap() as f64 / 2f64.powi(6) / (1.0 - 2f64.powi(-6))
        })
        .collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.reverse();
    v
}

pub fn blocks(a: &SmallDense, block_rows: usize) -> BlockRowMatrix {
    BlockRowMatrix::from_dense(a, block_rows).unwrap()
}

pub fn rel_close(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len()
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| (g - w).abs() <= tol * w.abs().max(f64::MIN_POSITIVE))
}
