use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// The operator `G = sum_n A(n) ⊗ x(n) y(n)^T`.
///
/// `A(n)` is `F x F`; `x(n)` and `y(n)` are column `n` of the `N x N`
/// matrices `X` and `Y`. The rank-one factors `x(n) y(n)^T` are derived on
/// demand, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct KronRankOneInstance<T> {
    f: usize,
    n: usize,
    a: Vec<DenseMatrix<T>>,
    x: DenseMatrix<T>,
    y: DenseMatrix<T>,
}

impl<T: Scalar> KronRankOneInstance<T> {
    pub fn new(f: usize, n: usize, a: Vec<DenseMatrix<T>>, x: DenseMatrix<T>, y: DenseMatrix<T>) -> Result<Self> {
        if f == 0 || n == 0 {
            return Err(Error::Shape(format!("F and N must be positive, got F={f}, N={n}")));
        }
        if a.len() != n {
            return Err(Error::Shape(format!("expected N={n} matrices A, got {}", a.len())));
        }
        if let Some((k, bad)) = a.iter().enumerate().find(|(_, m)| m.rows() != f || m.cols() != f) {
            return Err(Error::Shape(format!(
                "A[{k}] must be {f}x{f}, got {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        for (name, m) in [("X", &x), ("Y", &y)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape(format!(
                    "{name} must be {n}x{n}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(KronRankOneInstance { f, n, a, x, y })
    }

    /// Size of each `A(n)`.
    pub fn f(&self) -> usize {
        self.f
    }

    /// Number of terms, and size of `X` and `Y`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Order of `G`.
    pub fn nf(&self) -> usize {
        self.n * self.f
    }

    pub fn a(&self) -> &[DenseMatrix<T>] {
        &self.a
    }

    pub fn x(&self) -> &DenseMatrix<T> {
        &self.x
    }

    pub fn y(&self) -> &DenseMatrix<T> {
        &self.y
    }

    /// `x(k)`, column `k` of `X` (0-based).
    pub fn x_vec(&self, k: usize) -> Result<Vec<T>> {
        self.x.column(k)
    }

    /// `y(k)`, column `k` of `Y` (0-based).
    pub fn y_vec(&self, k: usize) -> Result<Vec<T>> {
        self.y.column(k)
    }

    /// Returns a copy with `A(k)` replaced.
    pub fn with_a(&self, k: usize, a: DenseMatrix<T>) -> Result<Self> {
        let mut all = self.a.clone();
        *all.get_mut(k)
            .ok_or_else(|| Error::Shape(format!("no A[{k}] in an N={} instance", self.n)))? = a;
        Self::new(self.f, self.n, all, self.x.clone(), self.y.clone())
    }

    pub fn with_x(&self, x: DenseMatrix<T>) -> Result<Self> {
        Self::new(self.f, self.n, self.a.clone(), x, self.y.clone())
    }

    pub fn with_y(&self, y: DenseMatrix<T>) -> Result<Self> {
        Self::new(self.f, self.n, self.a.clone(), self.x.clone(), y)
    }

    /// The all-identity instance: `A(n) = I_F`, `X = Y = I_N`.
    pub fn identity(n: usize, f: usize) -> Self {
        KronRankOneInstance {
            f,
            n,
            a: vec![DenseMatrix::identity(f); n],
            x: DenseMatrix::identity(n),
            y: DenseMatrix::identity(n),
        }
    }
}

impl KronRankOneInstance<f64> {
    pub fn convert<T: Scalar>(&self) -> KronRankOneInstance<T> {
        KronRankOneInstance {
            f: self.f,
            n: self.n,
            a: self.a.iter().map(DenseMatrix::convert).collect(),
            x: self.x.convert(),
            y: self.y.convert(),
        }
    }

    pub fn to_exact(&self) -> KronRankOneInstance<BigRational> {
        self.convert()
    }
}
