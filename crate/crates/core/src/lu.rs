//! Elimination kernels behind [`Scalar::determinant`](crate::Scalar::determinant).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::matrix::DenseMatrix;
use crate::scalar::SignLogDet;

/// A pivot at or below `PIVOT_RTOL * max_abs_entry` marks the matrix singular.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Gaussian elimination with partial pivoting, accumulated in log space.
pub(crate) fn lu_float(m: &DenseMatrix<f64>) -> SignLogDet {
    debug_assert!(m.is_square());
    let n = m.rows();
    let threshold = PIVOT_RTOL * m.max_abs();
    let mut a = m.entries().to_vec();
    let mut sign: i8 = 1;
    let mut log_abs = 0.0;

    for k in 0..n {
        let (p, pivot_abs) =
            (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= threshold {
            return SignLogDet::zero();
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot_abs.ln();

        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n + k + 1..k * n + n];
        for row in lower.chunks_exact_mut(n) {
            let factor = row[k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                *x -= factor * u;
            }
        }
    }
    SignLogDet::new(sign, log_abs)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled by the lcm of its denominators, so elimination
/// runs over integers; every Bareiss division is exact.
pub(crate) fn bareiss_rational(m: &DenseMatrix<BigRational>) -> BigRational {
    debug_assert!(m.is_square());
    let n = m.rows();
    let mut row_scale = BigInt::one();
    let mut a: Vec<BigInt> = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = &m.entries()[i * n..(i + 1) * n];
        let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        a.extend(row.iter().map(|v| v.numer() * (&lcm / v.denom())));
        row_scale *= lcm;
    }
    BigRational::new(bareiss_integer(&mut a, n), row_scale)
}

/// Determinant of an integer matrix stored row-major in `a` (overwritten).
pub(crate) fn bareiss_integer(a: &mut [BigInt], n: usize) -> BigInt {
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let lead = a[i * n + k].clone();
            for j in k + 1..n {
                let v = &a[i * n + j] * &pivot - &lead * &a[k * n + j];
                a[i * n + j] = if prev.is_one() { v } else { v / &prev };
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = pivot;
    }
    let det = a[n * n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}
