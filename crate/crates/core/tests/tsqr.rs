mod common;

use common::*;
use tsvd_core::{orthonormality_error, tsqr_factor, RunConfig, SmallDense};

fn cfg() -> RunConfig {
    RunConfig::default()
}

#[test]
fn stacked_identity() {
    let a = SmallDense::eye(10, 5);
    let res = tsqr_factor(&blocks(&a, 3), &cfg()).unwrap();
    assert_eq!(res.kept_rank, 5);
    let qr = matmul(&res.q.to_dense(), &res.r_factor);
    assert!(qr.max_abs_diff(&a) <= 1e-14);
}

#[test]
fn duplicate_column_drops_rank() {
    let mut a = random(20, 3, &mut rng(21));
    for i in 0..20 {
        a.set(i, 2, a.get(i, 0));
    }
    assert_eq!(pivoted_qr_rank(&a, 1e-11), 2);
    for block_rows in [20, 6] {
        let res = tsqr_factor(&blocks(&a, block_rows), &cfg()).unwrap();
        assert_eq!(res.kept_rank, 2);
        let resid = norm2(&sub(&a, &matmul(&res.q.to_dense(), &res.r_factor)));
        assert!(resid <= 1e-12 * norm2(&a), "resid {resid:e}");
        assert!(orthonormality_error(&res.q) <= 1e-14);
    }
}

#[test]
fn partition_count_does_not_matter() {
    let a = random(64, 5, &mut rng(22));
    let scale = norm2(&a);
    let q_ref = householder_q(&a);
    for parts in [1, 2, 7] {
        let block_rows = 64usize.div_ceil(parts);
        let parted = blocks(&a, block_rows);
        assert_eq!(parted.num_blocks(), parts);
        let res = tsqr_factor(&parted, &cfg()).unwrap();
        assert_eq!(res.kept_rank, 5);
        let q = res.q.to_dense();
        let resid = norm2(&sub(&a, &matmul(&q, &res.r_factor)));
        assert!(resid <= 1e-13 * scale, "{parts} blocks: {resid:e}");
        // Same column space as the dense reference: |Q_refᵀ Q| is a signed identity.
        let overlap = matmul(&transpose(&q_ref), &q);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((overlap.get(i, j).abs() - want).abs() <= 1e-12);
            }
        }
        assert!(res.root_diagonal.iter().all(|&d| d >= 0.0));
    }
}

#[test]
fn rejects_wide_and_rowless() {
    let wide = blocks(&SmallDense::zeros(2, 4), 1);
    assert!(tsqr_factor(&wide, &cfg()).is_err());
}

#[test]
fn zero_matrix() {
    let res = tsqr_factor(&blocks(&SmallDense::zeros(12, 4), 5), &cfg()).unwrap();
    assert_eq!(res.kept_rank, 0);
    assert!(res.q.is_finite() && res.r_factor.is_finite());
}
