//! Worked instances with values computed independently of the closed form.

use kronrank_core::expansion::{full_leibniz_check, sum_block_diagonal, y_power_identity};
use kronrank_core::generator::{random_instance, Profile};
use kronrank_core::verify::{log_space_agree, verify_instance};
use kronrank_core::{
    closed_form_det, closed_form_value, determinant, leibniz_det, materialize, materialized_det, BigRational,
    DenseMatrix, KronRankOneInstance, Scalar,
};

fn q(v: i64) -> BigRational {
    BigRational::from_i64(v)
}

fn qm(rows: &[&[i64]]) -> DenseMatrix<BigRational> {
    DenseMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()).unwrap()
}

#[test]
fn single_term_is_a_scaled_copy_of_a() {
    // N = 1: G = (x y) A
    let inst = KronRankOneInstance::new(2, 1, vec![qm(&[&[1, 2], &[3, 4]])], qm(&[&[2]]), qm(&[&[3]])).unwrap();
    assert_eq!(materialize(&inst), qm(&[&[6, 12], &[18, 24]]));
    assert_eq!(closed_form_det(&inst).total.value, q(-72));
}

#[test]
fn hand_built_two_by_two_blocks() {
    let inst = KronRankOneInstance::new(
        2,
        2,
        vec![qm(&[&[1, 0], &[0, 1]]), qm(&[&[0, 1], &[1, 0]])],
        qm(&[&[1, 1], &[0, 1]]),
        qm(&[&[1, 0], &[0, 1]]),
    )
    .unwrap();
    let g = qm(&[&[1, 0, 0, 1], &[0, 0, 0, 1], &[0, 1, 1, 0], &[0, 1, 0, 0]]);
    assert_eq!(materialize(&inst), g);
    assert_eq!(leibniz_det(&g).unwrap(), q(-1));
    assert_eq!(closed_form_det(&inst).total.value, q(-1));
}

#[test]
fn seed_42_float_matches_dense() {
    let inst = random_instance::<f64>(3, 2, 42, Profile::Uniform).unwrap();
    let closed = closed_form_det(&inst).total;
    let dense = materialized_det(&inst, 4096).unwrap();
    assert!(log_space_agree(&closed.sign_log, &dense.sign_log));
    assert!(verify_instance(&inst, 4096, None).unwrap().passed);
}

#[test]
fn seed_42_exact_matches_dense() {
    let inst = random_instance::<BigRational>(3, 2, 42, Profile::IntegerSmall).unwrap();
    assert_eq!(
        closed_form_det(&inst).total.value,
        materialized_det(&inst, 4096).unwrap().value
    );
}

#[test]
fn f_equal_one_reduces_to_x_diag_y() {
    for seed in 0..10 {
        let inst = random_instance::<BigRational>(4, 1, seed, Profile::IntegerSmall).unwrap();
        let diag: Vec<BigRational> = inst.a().iter().map(|a| a[(0, 0)].clone()).collect();
        let g = inst
            .x()
            .matmul(&DenseMatrix::from_diagonal(&diag))
            .unwrap()
            .matmul(&inst.y().transpose())
            .unwrap();
        assert_eq!(materialize(&inst), g);
        assert_eq!(closed_form_det(&inst).total.value, determinant(&g).unwrap().value);
    }
}

#[test]
fn identity_x_and_y_leave_the_product_of_det_a() {
    for seed in 0..10 {
        let base = random_instance::<BigRational>(3, 3, seed, Profile::IntegerSmall).unwrap();
        let inst = base
            .with_x(DenseMatrix::identity(3))
            .unwrap()
            .with_y(DenseMatrix::identity(3))
            .unwrap();
        let expected = inst
            .a()
            .iter()
            .map(|a| leibniz_det(a).unwrap())
            .fold(q(1), |acc, d| acc * d);
        assert_eq!(closed_form_det(&inst).total.value, expected);
        assert_eq!(materialized_det(&inst, 4096).unwrap().value, expected);
    }
}

#[test]
fn identity_profile_has_unit_determinant() {
    let inst = random_instance::<f64>(4, 3, 9, Profile::Identity).unwrap();
    assert_eq!(materialize(&inst), DenseMatrix::identity(12));
    let v = closed_form_value(&inst);
    assert_eq!(v.value, 1.0);
}

#[test]
fn singular_profiles_give_exact_zero() {
    for profile in [Profile::SingularA, Profile::SingularX, Profile::SingularY] {
        for seed in 0..5 {
            let inst = random_instance::<BigRational>(3, 2, seed, profile).unwrap();
            let b = closed_form_det(&inst);
            assert_eq!(b.total.value, q(0));
            assert_eq!(b.zero_factors().len(), 1, "{profile} seed {seed}");
            assert_eq!(materialized_det(&inst, 4096).unwrap().value, q(0));
        }
    }
}

#[test]
fn expansion_pieces_on_a_small_instance() {
    let inst = random_instance::<BigRational>(2, 2, 42, Profile::IntegerSmall).unwrap();
    let s = sum_block_diagonal(&inst, 1_000_000).unwrap();
    assert_eq!(s.tuples, 4);
    assert_eq!(s.sum, s.expected);
    let yp = y_power_identity(inst.y(), 2, 1_000_000).unwrap();
    assert_eq!(yp.sum, determinant(inst.y()).unwrap().value.pow(2));
    let lc = full_leibniz_check(&inst).unwrap();
    assert_eq!(lc.leibniz, lc.closed_form);
}
