//! Determinants of `G = sum_n A(n) ⊗ x(n) y(n)ᵀ`, where `A(n)` is `F x F` and
//! `x(n)`, `y(n)` are the `n`-th columns of `N x N` matrices `X` and `Y`:
//!
//! ```text
//! det(G) = (prod_n det A(n)) · det(X)^F · det(Y)^F
//! ```
//!
//! The crate evaluates that product directly ([`closed_form`]), checks it
//! against brute force on the materialized `NF x NF` matrix ([`oracle`]),
//! and replays the permutation-expansion argument behind the identity term
//! by term ([`expansion`]). Everything is generic over [`Scalar`]: `f64` for
//! scale, [`BigRational`](num_rational::BigRational) for exact equality.

pub mod bench;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod expansion;
pub mod generator;
pub mod instance;
pub mod io;
mod lu;
pub mod matrix;
pub mod oracle;
pub mod permutation;
pub mod scalar;
pub mod verify;

pub use closed_form::{closed_form_det, closed_form_value, determinant, lu_sign_log_det, ClosedFormBreakdown};
pub use error::{Error, Result};
pub use instance::KronRankOneInstance;
pub use lu::PIVOT_RTOL;
pub use matrix::DenseMatrix;
pub use num_rational::BigRational;
pub use oracle::{kron, leibniz_det, materialize, materialized_det, outer};
pub use permutation::{enumerate_gamma, Permutation, PermutationTuple};
pub use scalar::{Det, FloatValue, Scalar, ScalarMode, SignLogDet};
