//! Term-by-term replay of the column-selection expansion of `det(G)`.
//!
//! Column `f·N + j` of `G` (block column `f`, inner column `j`, 0-based) is a
//! sum over terms `t` of `A(t)[:, f] ⊗ Y[j, t]·x(t)`. Expanding the
//! determinant multilinearly picks one term per column; a pick that repeats
//! a term inside one block column yields two parallel columns, so the
//! surviving picks are exactly the tuples `(γ¹, …, γ^F) ∈ (S_N)^F` with
//! block column `f` drawing inner column `j` from term `γ^f(j)`.
//!
//! This module evaluates the pieces of that argument for every tuple:
//! the rank-one column determinant, the block-diagonal part of each
//! selection, their sums, and the `det(Y)^F` collapse. Every routine checks
//! its identity on the spot and returns [`Error::Verification`] on mismatch;
//! in EXACT mode the checks are exact equalities.

use crate::closed_form::{closed_form_value, determinant};
use crate::error::{Error, Result};
use crate::instance::KronRankOneInstance;
use crate::matrix::DenseMatrix;
use crate::oracle::{leibniz_det, materialize, LEIBNIZ_MAX_SIZE};
use crate::permutation::{enumerate_gamma, lex_permutations, Permutation, PermutationTuple};
use crate::scalar::Scalar;

fn check_perm<T: Scalar>(inst: &KronRankOneInstance<T>, gamma: &Permutation) -> Result<()> {
    if gamma.len() != inst.n() {
        return Err(Error::Shape(format!(
            "permutation of size {} for an N={} instance",
            gamma.len(),
            inst.n()
        )));
    }
    Ok(())
}

fn check_tuple<T: Scalar>(inst: &KronRankOneInstance<T>, gamma: &PermutationTuple) -> Result<()> {
    if gamma.n() != inst.n() || gamma.f() != inst.f() {
        return Err(Error::Shape(format!(
            "tuple in (S_{})^{} for an N={}, F={} instance",
            gamma.n(),
            gamma.f(),
            inst.n(),
            inst.f()
        )));
    }
    Ok(())
}

fn signed<T: Scalar>(v: T, sign: i8) -> T {
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// `prod_k Y[k, γ(k)]`.
fn y_diagonal_product<T: Scalar>(y: &DenseMatrix<T>, gamma: &Permutation) -> T {
    (0..gamma.len()).fold(T::one(), |acc, k| acc * y[(k, gamma.apply(k))].clone())
}

/// The `N x N` matrix whose column `j` is column `j` of `x(γ(j)) y(γ(j))ᵀ`,
/// i.e. `Y[j, γ(j)] · x(γ(j))`.
pub fn b_column_matrix<T: Scalar>(inst: &KronRankOneInstance<T>, gamma: &Permutation) -> Result<DenseMatrix<T>> {
    check_perm(inst, gamma)?;
    let (x, y) = (inst.x(), inst.y());
    Ok(DenseMatrix::from_fn(inst.n(), inst.n(), |k, j| {
        let t = gamma.apply(j);
        y[(j, t)].clone() * x[(k, t)].clone()
    }))
}

/// Both evaluations of the rank-one column determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct BColumnsDet<T> {
    /// Determinant of [`b_column_matrix`].
    pub assembled: T,
    /// `(prod_k Y[k, γ(k)]) · det(X) · sgn(γ)`.
    pub factored: T,
}

/// Computes `det [B^{γ(1)}_1 … B^{γ(N)}_N]` by elimination on the assembled
/// columns and by the factored form, and fails if the two disagree.
pub fn b_columns_det_paths<T: Scalar>(inst: &KronRankOneInstance<T>, gamma: &Permutation) -> Result<BColumnsDet<T>> {
    let m = b_column_matrix(inst, gamma)?;
    let assembled = T::determinant(&m).value;
    let x_det = T::determinant(inst.x()).value;
    let y_prod = y_diagonal_product(inst.y(), gamma);
    let scale = m
        .hadamard_bound()
        .max(y_prod.to_f64().abs() * inst.x().hadamard_bound());
    let factored = signed(y_prod * x_det, gamma.sign());
    if !assembled.agrees_with(&factored, scale) {
        return Err(Error::Verification {
            check: "detb",
            detail: format!(
                "gamma {:?}: assembled {} vs factored {}",
                gamma.images(),
                assembled.to_text(),
                factored.to_text()
            ),
        });
    }
    Ok(BColumnsDet { assembled, factored })
}

/// `det [B^{γ(1)}_1 … B^{γ(N)}_N]` after the dual-path check.
pub fn b_columns_det<T: Scalar>(inst: &KronRankOneInstance<T>, gamma: &Permutation) -> Result<T> {
    b_columns_det_paths(inst, gamma).map(|d| d.assembled)
}

/// The full column selection `C^γ`: column `f·N + j` is column `f·N + j`
/// of `A(t) ⊗ x(t) y(t)ᵀ` with `t = γ^f(j)`.
pub fn assemble_column_selection<T: Scalar>(
    inst: &KronRankOneInstance<T>,
    gamma: &PermutationTuple,
) -> Result<DenseMatrix<T>> {
    check_tuple(inst, gamma)?;
    Ok(selection_matrix(inst, gamma, false))
}

/// `C^γ` with every off-diagonal `N x N` block set to zero.
pub fn assemble_c_diag<T: Scalar>(inst: &KronRankOneInstance<T>, gamma: &PermutationTuple) -> Result<DenseMatrix<T>> {
    check_tuple(inst, gamma)?;
    Ok(selection_matrix(inst, gamma, true))
}

fn selection_matrix<T: Scalar>(
    inst: &KronRankOneInstance<T>,
    gamma: &PermutationTuple,
    diag_only: bool,
) -> DenseMatrix<T> {
    let n = inst.n();
    let nf = inst.nf();
    let (x, y) = (inst.x(), inst.y());
    DenseMatrix::from_fn(nf, nf, |r, c| {
        let (g, k) = (r / n, r % n);
        let (f, j) = (c / n, c % n);
        if diag_only && g != f {
            return T::zero();
        }
        let t = gamma.gammas()[f].apply(j);
        inst.a()[t][(g, f)].clone() * x[(k, t)].clone() * y[(j, t)].clone()
    })
}

/// `det(C_diag^γ)` split into its diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalContribution<T> {
    pub gamma: PermutationTuple,
    pub per_block_dets: Vec<T>,
    pub total: T,
}

/// Block `f` of `C_diag^γ` is `(prod_n A(γ^f(n))[f, f]) · [B^{γ^f(1)}_1 …]`,
/// so its determinant is that product times [`b_columns_det`].
pub fn c_diag_det<T: Scalar>(
    inst: &KronRankOneInstance<T>,
    gamma: &PermutationTuple,
) -> Result<BlockDiagonalContribution<T>> {
    check_tuple(inst, gamma)?;
    let per_block_dets = gamma
        .gammas()
        .iter()
        .enumerate()
        .map(|(f, g)| Ok(a_diagonal_product(inst, f, g) * b_columns_det(inst, g)?))
        .collect::<Result<Vec<T>>>()?;
    let total = per_block_dets.iter().fold(T::one(), |acc, d| acc * d.clone());
    Ok(BlockDiagonalContribution {
        gamma: gamma.clone(),
        per_block_dets,
        total,
    })
}

/// `prod_j A(γ(j))[f, f]`.
fn a_diagonal_product<T: Scalar>(inst: &KronRankOneInstance<T>, f: usize, gamma: &Permutation) -> T {
    (0..gamma.len()).fold(T::one(), |acc, j| acc * inst.a()[gamma.apply(j)][(f, f)].clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumCheck<T> {
    pub tuples: u128,
    /// The enumerated sum.
    pub sum: T,
    /// The value it must equal.
    pub expected: T,
}

/// `sum over (S_N)^F of det(C_diag^γ)`, checked against
/// `(prod_f prod_n A(n)[f, f]) · det(X)^F · det(Y)^F`.
///
/// Block determinants depend only on `(f, γ^f)`, so they are computed once
/// per pair (each through the [`b_columns_det`] dual-path check) and the
/// tuple totals are products of table entries.
pub fn sum_block_diagonal<T: Scalar>(inst: &KronRankOneInstance<T>, limit: u128) -> Result<SumCheck<T>> {
    let mut tuples = enumerate_gamma(inst.n(), inst.f(), limit)?;
    let table: Vec<Vec<T>> = (0..inst.f())
        .map(|f| {
            tuples
                .permutations()
                .iter()
                .map(|g| Ok(a_diagonal_product(inst, f, g) * b_columns_det(inst, g)?))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;

    let mut sum = T::zero();
    let mut abs_sum = 0.0;
    let mut count = 0u128;
    while let Some(idx) = tuples.next_indices() {
        let total = idx
            .iter()
            .enumerate()
            .fold(T::one(), |acc, (f, &p)| acc * table[f][p].clone());
        abs_sum += total.to_f64().abs();
        sum = sum + total;
        count += 1;
    }

    let f = inst.f();
    let a_diag = (0..f).fold(T::one(), |acc, i| {
        inst.a().iter().fold(acc, |acc, a| acc * a[(i, i)].clone())
    });
    let expected = a_diag
        * num_traits::pow(T::determinant(inst.x()).value, f)
        * num_traits::pow(T::determinant(inst.y()).value, f);
    if !sum.agrees_with(&expected, abs_sum) {
        return Err(Error::Verification {
            check: "sumdiag",
            detail: format!("sum {} vs diagonal-product form {}", sum.to_text(), expected.to_text()),
        });
    }
    Ok(SumCheck {
        tuples: count,
        sum,
        expected,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct YPowerCheck<T> {
    pub tuples: u128,
    /// `sum over (S_N)^F of prod_i sgn(γ^i) prod_k Y[k, γ^i(k)]`.
    pub sum: T,
    /// `(sum over S_N of sgn(γ) prod_k Y[k, γ(k)])^F`.
    pub factorized: T,
    /// `det(Y)^F` by elimination.
    pub det_y_pow: T,
}

/// Enumerates the `(S_N)^F` sum of signed `Y` diagonal products and checks
/// it against `det(Y)^F` and against the `F`-th power of the single sum.
pub fn y_power_identity<T: Scalar>(y: &DenseMatrix<T>, f: usize, limit: u128) -> Result<YPowerCheck<T>> {
    if !y.is_square() {
        return Err(Error::Shape(format!("Y must be square, got {}x{}", y.rows(), y.cols())));
    }
    let mut tuples = enumerate_gamma(y.rows(), f, limit)?;
    let terms: Vec<T> = tuples
        .permutations()
        .iter()
        .map(|g| signed(y_diagonal_product(y, g), g.sign()))
        .collect();

    let mut sum = T::zero();
    let mut abs_sum = 0.0;
    let mut count = 0u128;
    while let Some(idx) = tuples.next_indices() {
        let term = idx.iter().fold(T::one(), |acc, &p| acc * terms[p].clone());
        abs_sum += term.to_f64().abs();
        sum = sum + term;
        count += 1;
    }
    let single = terms.iter().fold(T::zero(), |acc, t| acc + t.clone());
    let factorized = num_traits::pow(single, f);
    let det_y_pow = num_traits::pow(T::determinant(y).value, f);

    for (what, other) in [("det(Y)^F", &det_y_pow), ("factorized sum", &factorized)] {
        if !sum.agrees_with(other, abs_sum) {
            return Err(Error::Verification {
                check: "ypower",
                detail: format!("tuple sum {} vs {what} {}", sum.to_text(), other.to_text()),
            });
        }
    }
    Ok(YPowerCheck {
        tuples: count,
        sum,
        factorized,
        det_y_pow,
    })
}

/// `sum over (S_N)^F of det(C^γ)` against `det(G)` on the materialized
/// matrix: the multilinear expansion restricted to the surviving selections.
pub fn sum_column_selections<T: Scalar>(inst: &KronRankOneInstance<T>, limit: u128) -> Result<SumCheck<T>> {
    let tuples = enumerate_gamma(inst.n(), inst.f(), limit)?;
    let mut sum = T::zero();
    let mut abs_sum = 0.0;
    let mut count = 0u128;
    for gamma in tuples {
        let c = selection_matrix(inst, &gamma, false);
        let d = T::determinant(&c).value;
        abs_sum += c.hadamard_bound();
        sum = sum + d;
        count += 1;
    }
    let expected = T::determinant(&materialize(inst)).value;
    if !sum.agrees_with(&expected, abs_sum) {
        return Err(Error::Verification {
            check: "columns",
            detail: format!("selection sum {} vs det(G) {}", sum.to_text(), expected.to_text()),
        });
    }
    Ok(SumCheck {
        tuples: count,
        sum,
        expected,
    })
}

/// Checks that `C_diag^γ` assembled explicitly has determinant equal to the
/// product of its block determinants from [`c_diag_det`], for every tuple.
pub fn check_c_diag_all<T: Scalar>(inst: &KronRankOneInstance<T>, limit: u128) -> Result<u128> {
    let mut count = 0u128;
    for gamma in enumerate_gamma(inst.n(), inst.f(), limit)? {
        let contribution = c_diag_det(inst, &gamma)?;
        let m = selection_matrix(inst, &gamma, true);
        let direct = T::determinant(&m).value;
        if !direct.agrees_with(&contribution.total, m.hadamard_bound()) {
            return Err(Error::Verification {
                check: "cdiag",
                detail: format!(
                    "tuple {:?}: block product {} vs assembled {}",
                    gamma.gammas(),
                    contribution.total.to_text(),
                    direct.to_text()
                ),
            });
        }
        count += 1;
    }
    Ok(count)
}

/// Runs [`b_columns_det`] for every `γ ∈ S_N`; returns how many were checked.
pub fn check_b_columns_all<T: Scalar>(inst: &KronRankOneInstance<T>, limit: u128) -> Result<u128> {
    crate::permutation::check_tuple_limit(inst.n(), 1, limit)?;
    let mut count = 0u128;
    for gamma in lex_permutations(inst.n()) {
        b_columns_det(inst, &gamma)?;
        count += 1;
    }
    Ok(count)
}

/// `leibniz_det(materialize(inst))` against the closed-form value.
#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizCheck<T> {
    pub leibniz: T,
    pub closed_form: T,
}

pub fn full_leibniz_check<T: Scalar>(inst: &KronRankOneInstance<T>) -> Result<LeibnizCheck<T>> {
    if inst.nf() > LEIBNIZ_MAX_SIZE {
        return Err(Error::Resource {
            what: "Leibniz expansion size",
            required: inst.nf() as u128,
            limit: LEIBNIZ_MAX_SIZE as u128,
        });
    }
    let g = materialize(inst);
    let leibniz = leibniz_det(&g)?;
    let closed_form = closed_form_value(inst).value;
    let scale = determinant(&g)?.value.to_f64().abs().max(g.hadamard_bound());
    if !leibniz.agrees_with(&closed_form, scale) {
        return Err(Error::Verification {
            check: "full-leibniz",
            detail: format!("Leibniz {} vs closed form {}", leibniz.to_text(), closed_form.to_text()),
        });
    }
    Ok(LeibnizCheck { leibniz, closed_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{random_instance, Profile};
    use crate::permutation::DEFAULT_TUPLE_LIMIT;
    use crate::BigRational;

    fn q(v: i64) -> BigRational {
        BigRational::from_i64(v)
    }

    #[test]
    fn b_columns_identity() {
        let inst = KronRankOneInstance::<BigRational>::identity(3, 2);
        assert_eq!(b_columns_det(&inst, &Permutation::identity(3)).unwrap(), q(1));
        let swap = Permutation::transposition(3, 0, 2).unwrap();
        let paths = b_columns_det_paths(&inst, &swap).unwrap();
        assert_eq!(paths.assembled, q(0));
        assert_eq!(paths.factored, q(0));
    }

    #[test]
    fn b_columns_both_paths_random() {
        let inst = random_instance::<BigRational>(3, 1, 3, Profile::IntegerSmall).unwrap();
        for g in lex_permutations(3) {
            let p = b_columns_det_paths(&inst, &g).unwrap();
            assert_eq!(p.assembled, p.factored);
        }
        let float = random_instance::<f64>(3, 1, 3, Profile::Uniform).unwrap();
        assert_eq!(check_b_columns_all(&float, DEFAULT_TUPLE_LIMIT).unwrap(), 6);
    }

    #[test]
    fn b_columns_rejects_wrong_size() {
        let inst = KronRankOneInstance::<f64>::identity(3, 1);
        assert!(matches!(
            b_columns_det(&inst, &Permutation::identity(2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn c_diag_identity_all_id() {
        let inst = KronRankOneInstance::<BigRational>::identity(2, 3);
        let t = PermutationTuple::new(vec![Permutation::identity(2); 3]).unwrap();
        let c = c_diag_det(&inst, &t).unwrap();
        assert_eq!(c.total, q(1));
        assert_eq!(c.per_block_dets, vec![q(1); 3]);
    }

    #[test]
    fn c_diag_single_block() {
        let inst = random_instance::<BigRational>(3, 1, 8, Profile::IntegerSmall).unwrap();
        for g in lex_permutations(3) {
            let t = PermutationTuple::new(vec![g.clone()]).unwrap();
            let a11: BigRational = (0..3).map(|j| inst.a()[g.apply(j)][(0, 0)].clone()).product();
            let expected = a11 * b_columns_det(&inst, &g).unwrap();
            assert_eq!(c_diag_det(&inst, &t).unwrap().total, expected);
        }
    }

    #[test]
    fn c_diag_matches_leibniz_of_assembled_blocks() {
        let inst = random_instance::<BigRational>(2, 2, 21, Profile::IntegerSmall).unwrap();
        for t in enumerate_gamma(2, 2, DEFAULT_TUPLE_LIMIT).unwrap() {
            let m = assemble_c_diag(&inst, &t).unwrap();
            assert_eq!(leibniz_det(&m).unwrap(), c_diag_det(&inst, &t).unwrap().total);
            // off-diagonal blocks are zero
            for r in 0..4 {
                for c in 0..4 {
                    if r / 2 != c / 2 {
                        assert_eq!(m[(r, c)], q(0));
                    }
                }
            }
        }
        assert_eq!(check_c_diag_all(&inst, DEFAULT_TUPLE_LIMIT).unwrap(), 4);
    }

    #[test]
    fn table_sum_equals_per_tuple_sum() {
        let inst = random_instance::<BigRational>(3, 2, 42, Profile::IntegerSmall).unwrap();
        let direct: BigRational = enumerate_gamma(3, 2, DEFAULT_TUPLE_LIMIT)
            .unwrap()
            .map(|t| c_diag_det(&inst, &t).unwrap().total)
            .sum();
        let s = sum_block_diagonal(&inst, DEFAULT_TUPLE_LIMIT).unwrap();
        assert_eq!(s.tuples, 36);
        assert_eq!(s.sum, direct);
        assert_eq!(s.sum, s.expected);
    }

    #[test]
    fn sum_block_diagonal_identity_and_f1() {
        let id = KronRankOneInstance::<BigRational>::identity(3, 2);
        assert_eq!(sum_block_diagonal(&id, DEFAULT_TUPLE_LIMIT).unwrap().sum, q(1));
        let inst = random_instance::<BigRational>(4, 1, 2, Profile::IntegerSmall).unwrap();
        let s = sum_block_diagonal(&inst, DEFAULT_TUPLE_LIMIT).unwrap();
        // F = 1: G = X diag(a) Yᵀ
        let a: Vec<BigRational> = inst.a().iter().map(|m| m[(0, 0)].clone()).collect();
        let g = inst
            .x()
            .matmul(&DenseMatrix::from_diagonal(&a))
            .unwrap()
            .matmul(&inst.y().transpose())
            .unwrap();
        assert_eq!(s.sum, BigRational::determinant(&g).value);
    }

    #[test]
    fn sum_block_diagonal_float() {
        let inst = random_instance::<f64>(3, 2, 42, Profile::Uniform).unwrap();
        let s = sum_block_diagonal(&inst, DEFAULT_TUPLE_LIMIT).unwrap();
        assert!(s.sum.agrees_with(&s.expected, 1.0));
    }

    #[test]
    fn y_power_examples() {
        let id = DenseMatrix::<BigRational>::identity(2);
        assert_eq!(y_power_identity(&id, 2, DEFAULT_TUPLE_LIMIT).unwrap().sum, q(1));
        let y = random_instance::<BigRational>(3, 1, 9, Profile::IntegerSmall)
            .unwrap()
            .y()
            .clone();
        let one = y_power_identity(&y, 1, DEFAULT_TUPLE_LIMIT).unwrap();
        assert_eq!(one.sum, leibniz_det(&y).unwrap());
        let three = y_power_identity(&y, 3, DEFAULT_TUPLE_LIMIT).unwrap();
        assert_eq!(three.tuples, 216);
        assert_eq!(three.sum, num_traits::pow(leibniz_det(&y).unwrap(), 3));
        assert_eq!(three.sum, three.factorized);
    }

    #[test]
    fn y_power_rejects_rectangular_and_limit() {
        assert!(y_power_identity(&DenseMatrix::<f64>::zeros(2, 3), 1, DEFAULT_TUPLE_LIMIT).is_err());
        assert!(matches!(
            y_power_identity(&DenseMatrix::<f64>::identity(5), 3, DEFAULT_TUPLE_LIMIT),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn column_selections_sum_to_det_g() {
        for seed in 0..5 {
            let inst = random_instance::<BigRational>(3, 2, seed, Profile::IntegerSmall).unwrap();
            let s = sum_column_selections(&inst, DEFAULT_TUPLE_LIMIT).unwrap();
            assert_eq!(s.sum, s.expected);
            assert_eq!(s.tuples, 36);
        }
    }

    #[test]
    fn repeated_term_in_block_column_vanishes() {
        // a selection that takes two columns of one block column from the same term
        let inst = random_instance::<BigRational>(3, 2, 5, Profile::IntegerSmall).unwrap();
        let n = 3;
        let m = DenseMatrix::from_fn(6, 6, |r, c| {
            let (g, k) = (r / n, r % n);
            let (f, j) = (c / n, c % n);
            let t = if f == 0 { [0, 0, 2][j] } else { j };
            inst.a()[t][(g, f)].clone() * inst.x()[(k, t)].clone() * inst.y()[(j, t)].clone()
        });
        assert_eq!(leibniz_det(&m).unwrap(), q(0));
    }

    #[test]
    fn full_leibniz_small() {
        let inst = random_instance::<BigRational>(2, 3, 1, Profile::IntegerSmall).unwrap();
        let c = full_leibniz_check(&inst).unwrap();
        assert_eq!(c.leibniz, c.closed_form);
        let big = KronRankOneInstance::<BigRational>::identity(5, 2);
        assert!(matches!(full_leibniz_check(&big), Err(Error::Resource { .. })));
    }
}
