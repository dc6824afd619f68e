mod common;

use common::*;
use proptest::prelude::*;
use tsvd_core::{MixingOperator, SmallDense};

/// Ω assembled one basis vector at a time.
fn columns_of(op: &MixingOperator) -> SmallDense {
    let n = op.n();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let e = SmallDense::from_fn(n, 1, |i, _| if i == j { 1.0 } else { 0.0 });
            op.apply(&e).unwrap().column(0)
        })
        .collect();
    SmallDense::from_fn(n, n, |i, j| cols[j][i])
}

#[test]
fn deterministic_per_seed() {
    assert_eq!(MixingOperator::build(16, 3).unwrap(), MixingOperator::build(16, 3).unwrap());
    let a = MixingOperator::build(4, 1).unwrap();
    let b = MixingOperator::build(4, 2).unwrap();
    assert_ne!(a.inner_stage().phases, b.inner_stage().phases);
    assert!(MixingOperator::build(1, 0).is_err());
    assert!(MixingOperator::build(0, 0).is_err());
}

#[test]
fn materialized_operator_is_orthogonal() {
    for n in [2, 3, 5, 8, 9, 32] {
        let op = MixingOperator::build(n, 11).unwrap();
        let omega = columns_of(&op);
        let oto = matmul(&transpose(&omega), &omega);
        assert!(oto.max_abs_diff(&SmallDense::identity(n)) <= 1e-13, "n = {n}");
        assert!(op.materialize().max_abs_diff(&omega) <= 1e-15);
    }
}

#[test]
fn row_forms_match_materialized_products() {
    let mut r = rng(12);
    for n in [6, 7] {
        let op = MixingOperator::build(n, 4).unwrap();
        let omega = columns_of(&op);
        let x = random(5, n, &mut r);
        let rows = op.apply_to_rows(&x).unwrap();
        assert!(rows.max_abs_diff(&matmul(&x, &transpose(&omega))) <= 1e-14);
        let back = op.apply_inverse_to_rows(&rows).unwrap();
        assert!(back.max_abs_diff(&x) <= 1e-14);
        let xt = transpose(&x);
        let inv = op.apply_inverse(&xt).unwrap();
        assert!(inv.max_abs_diff(&matmul(&transpose(&omega), &xt)) <= 1e-14);
    }
}

#[test]
fn rejects_wrong_height() {
    let op = MixingOperator::build(8, 0).unwrap();
    assert!(op.apply(&SmallDense::zeros(7, 1)).is_err());
    assert!(op.apply_to_rows(&SmallDense::zeros(1, 7)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn preserves_norms(n in 2usize..40, seed in any::<u64>(), data_seed in any::<u64>()) {
        let op = MixingOperator::build(n, seed).unwrap();
        let x = random(n, 2, &mut rng(data_seed));
        let y = op.apply(&x).unwrap();
        let z = op.apply_inverse(&x).unwrap();
        for j in 0..2 {
            let nx: f64 = x.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            let ny: f64 = y.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            let nz: f64 = z.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((nx - ny).abs() <= 1e-13 * nx);
            prop_assert!((nx - nz).abs() <= 1e-13 * nx);
        }
        prop_assert!(op.apply_inverse(&y).unwrap().max_abs_diff(&x) <= 1e-13);
    }
}
