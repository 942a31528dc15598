//! Brute-force ground truth: build `G` explicitly and take its determinant.

use crate::closed_form::determinant;
use crate::error::{Error, Result};
use crate::instance::KronRankOneInstance;
use crate::matrix::DenseMatrix;
use crate::scalar::{Det, Scalar, SignLogDet};

/// Default largest `NF` the dense oracle will factor.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Environment variable that overrides [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "KRONRANK_DENSE_CAP";

/// Largest matrix [`leibniz_det`] will expand (9! terms).
pub const LEIBNIZ_MAX_SIZE: usize = 9;

/// The dense cap from [`DENSE_CAP_ENV`], falling back to the default.
pub fn dense_cap_from_env() -> Result<usize> {
    match std::env::var(DENSE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{DENSE_CAP_ENV}={v:?} is not a count"))),
        Err(_) => Ok(DEFAULT_DENSE_CAP),
    }
}

/// Kronecker product with `a` supplying the block (outer) indices:
/// `(a ⊗ b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]`.
pub fn kron<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (rb, cb) = (b.rows(), b.cols());
    DenseMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| {
        a[(r / rb, c / cb)].clone() * b[(r % rb, c % cb)].clone()
    })
}

/// `x yᵀ`.
pub fn outer<T: Scalar>(x: &[T], y: &[T]) -> Result<DenseMatrix<T>> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape(format!(
            "outer product needs equal non-empty lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(DenseMatrix::from_fn(x.len(), y.len(), |k, l| {
        x[k].clone() * y[l].clone()
    }))
}

/// The `NF x NF` matrix `sum_n A(n) ⊗ x(n) y(n)ᵀ`.
///
/// Entry `(i*N + k, j*N + l)` is `sum_n A(n)[i, j] * X[k, n] * Y[l, n]`.
pub fn materialize<T: Scalar>(inst: &KronRankOneInstance<T>) -> DenseMatrix<T> {
    let (n, f) = (inst.n(), inst.f());
    let nf = n * f;
    let mut g: DenseMatrix<T> = DenseMatrix::zeros(nf, nf);
    for (t, a) in inst.a().iter().enumerate() {
        let x = inst.x_vec(t).expect("column in range");
        let y = inst.y_vec(t).expect("column in range");
        let b = outer(&x, &y).expect("x and y have length N");
        for i in 0..f {
            for j in 0..f {
                let aij = &a[(i, j)];
                if aij.is_zero() {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        let term = aij.clone() * b[(k, l)].clone();
                        let slot: &mut T = &mut g[(i * n + k, j * n + l)];
                        *slot = slot.clone() + term;
                    }
                }
            }
        }
    }
    g
}

/// Determinant of the materialized `G`; refuses `NF > cap`.
pub fn materialized_det<T: Scalar>(inst: &KronRankOneInstance<T>, cap: usize) -> Result<Det<T>> {
    check_dense_cap(inst.nf(), cap)?;
    determinant(&materialize(inst))
}

pub(crate) fn check_dense_cap(nf: usize, cap: usize) -> Result<()> {
    if nf > cap {
        return Err(Error::Resource {
            what: "dense matrix order NF",
            required: nf as u128,
            limit: cap as u128,
        });
    }
    Ok(())
}

/// `sum_σ sgn(σ) prod_i m[i, σ(i)]` by explicit enumeration of `S_m`.
///
/// Terms are visited depth-first in lexicographic order of `σ`, sharing
/// partial products along the way, and summed in that fixed order. A zero
/// entry ends its branch, since every term below it vanishes.
pub fn leibniz_det<T: Scalar>(m: &DenseMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > LEIBNIZ_MAX_SIZE {
        return Err(Error::Resource {
            what: "Leibniz expansion size",
            required: m.rows() as u128,
            limit: LEIBNIZ_MAX_SIZE as u128,
        });
    }
    let mut used = vec![false; m.rows()];
    let mut acc = T::zero();
    leibniz_branch(m, 0, &mut used, T::one(), false, &mut acc);
    Ok(acc)
}

fn leibniz_branch<T: Scalar>(m: &DenseMatrix<T>, row: usize, used: &mut [bool], partial: T, odd: bool, acc: &mut T) {
    let n = m.rows();
    if row == n {
        let term = if odd { -partial } else { partial };
        *acc = acc.clone() + term;
        return;
    }
    for col in 0..n {
        if used[col] {
            continue;
        }
        let entry = &m[(row, col)];
        if entry.is_zero() {
            continue;
        }
        // columns already placed to the right of `col` form new inversions
        let crossings = used[col + 1..].iter().filter(|&&u| u).count();
        used[col] = true;
        leibniz_branch(
            m,
            row + 1,
            used,
            partial.clone() * entry.clone(),
            odd ^ (crossings % 2 == 1),
            acc,
        );
        used[col] = false;
    }
}

/// Both sides of `det(A ⊗ B) = det(A)^{size B} · det(B)^{size A}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KronDetCheck<T> {
    pub lhs: Det<T>,
    pub rhs: Det<T>,
}

impl<T: Scalar> KronDetCheck<T> {
    /// Exact equality in EXACT mode; log-space agreement in FLOAT mode.
    pub fn holds(&self) -> bool {
        match T::MODE {
            crate::ScalarMode::Exact => self.lhs.value == self.rhs.value,
            crate::ScalarMode::Float => crate::verify::log_space_agree(&self.lhs.sign_log, &self.rhs.sign_log),
        }
    }
}

pub fn kron_det_check<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<KronDetCheck<T>> {
    let lhs = determinant(&kron(a, b))?;
    let da = determinant(a)?;
    let db = determinant(b)?;
    let (pa, pb) = (b.rows() as u32, a.rows() as u32);
    let sign_log: SignLogDet = da.sign_log.pow(pa).mul(&db.sign_log.pow(pb));
    let value = T::product_value(&[(&da.value, pa), (&db.value, pb)], &sign_log);
    Ok(KronDetCheck {
        lhs,
        rhs: Det { sign_log, value },
    })
}
