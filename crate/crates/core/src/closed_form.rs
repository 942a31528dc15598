//! `det(G) = (prod_n det A(n)) · det(X)^F · det(Y)^F`, evaluated from the
//! factors alone in `O(N·F³ + N³)`.
//!
//! Aggregation happens in `(sign, log|det|)` form; powers of `det X` and
//! `det Y` are applied as `F · log|det|`. In EXACT mode the plain value is
//! also carried exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::KronRankOneInstance;
use crate::matrix::DenseMatrix;
use crate::scalar::{Det, FloatValue, Scalar, SignLogDet};

/// Determinant of a square matrix in the matrix's scalar mode.
pub fn determinant<T: Scalar>(m: &DenseMatrix<T>) -> Result<Det<T>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(T::determinant(m))
}

/// Sign and `ln|det M|`. In FLOAT mode a pivot at or below
/// `1e-12 · max|M_ij|` makes the result zero.
pub fn lu_sign_log_det<T: Scalar>(m: &DenseMatrix<T>) -> Result<SignLogDet> {
    determinant(m).map(|d| d.sign_log)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormBreakdown<T> {
    pub det_a: Vec<Det<T>>,
    pub det_x: Det<T>,
    pub det_y: Det<T>,
    pub total: Det<T>,
}

impl<T: Scalar> ClosedFormBreakdown<T> {
    /// Names of the factors whose determinant is zero (`A[k]`, `X`, `Y`).
    pub fn zero_factors(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .det_a
            .iter()
            .enumerate()
            .filter(|(_, d)| d.sign_log.is_zero())
            .map(|(k, _)| format!("A[{k}]"))
            .collect();
        if self.det_x.sign_log.is_zero() {
            names.push("X".into());
        }
        if self.det_y.sign_log.is_zero() {
            names.push("Y".into());
        }
        names
    }
}

pub fn closed_form_det<T: Scalar>(inst: &KronRankOneInstance<T>) -> ClosedFormBreakdown<T> {
    let det_a: Vec<Det<T>> = inst.a().iter().map(T::determinant).collect();
    let det_x = T::determinant(inst.x());
    let det_y = T::determinant(inst.y());
    let f = inst.f() as u32;

    let sign_log = det_a
        .iter()
        .fold(SignLogDet::one(), |acc, d| acc.mul(&d.sign_log))
        .mul(&det_x.sign_log.pow(f))
        .mul(&det_y.sign_log.pow(f));

    let mut factors: Vec<(&T, u32)> = det_a.iter().map(|d| (&d.value, 1)).collect();
    factors.push((&det_x.value, f));
    factors.push((&det_y.value, f));
    let value = T::product_value(&factors, &sign_log);

    ClosedFormBreakdown {
        total: Det { sign_log, value },
        det_a,
        det_x,
        det_y,
    }
}

/// Plain determinant with range flags describing its `f64` view.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormValue<T> {
    pub value: T,
    pub sign_log: SignLogDet,
    pub overflow: bool,
    pub underflow: bool,
}

pub fn closed_form_value<T: Scalar>(inst: &KronRankOneInstance<T>) -> ClosedFormValue<T> {
    let total = closed_form_det(inst).total;
    let FloatValue {
        overflow, underflow, ..
    } = total.sign_log.value();
    ClosedFormValue {
        value: total.value,
        sign_log: total.sign_log,
        overflow,
        underflow,
    }
}

/// JSON-facing view of a [`ClosedFormBreakdown`].
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownReport {
    pub mode: crate::ScalarMode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "F")]
    pub f: usize,
    pub det_a: Vec<FactorReport>,
    pub det_x: FactorReport,
    pub det_y: FactorReport,
    pub total: FactorReport,
    pub zero_factors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorReport {
    #[serde(flatten)]
    pub sign_log: SignLogDet,
    #[serde(flatten)]
    pub value: FloatValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl FactorReport {
    pub fn from_det<T: Scalar>(d: &Det<T>) -> Self {
        FactorReport {
            sign_log: d.sign_log,
            value: d.sign_log.value(),
            exact: matches!(T::MODE, crate::ScalarMode::Exact).then(|| d.value.to_text()),
        }
    }
}

impl BreakdownReport {
    pub fn new<T: Scalar>(inst: &KronRankOneInstance<T>, b: &ClosedFormBreakdown<T>) -> Self {
        BreakdownReport {
            mode: T::MODE,
            n: inst.n(),
            f: inst.f(),
            det_a: b.det_a.iter().map(FactorReport::from_det).collect(),
            det_x: FactorReport::from_det(&b.det_x),
            det_y: FactorReport::from_det(&b.det_y),
            total: FactorReport::from_det(&b.total),
            zero_factors: b.zero_factors(),
        }
    }
}
