//! Closed form versus dense oracle on a single instance.

use serde::Serialize;

use crate::closed_form::{closed_form_det, determinant, FactorReport};
use crate::error::{Error, Result};
use crate::instance::KronRankOneInstance;
use crate::oracle::{check_dense_cap, materialize};
use crate::scalar::{Scalar, ScalarMode, SignLogDet};

/// Absolute part of the FLOAT log-space tolerance.
pub const LOG_ATOL: f64 = 1e-8;
/// Relative part of the FLOAT log-space tolerance.
pub const LOG_RTOL: f64 = 1e-6;

/// FLOAT-mode agreement: equal signs, and either both zero or
/// `|Δ ln|det|| <= 1e-8 + 1e-6 · max(1, |ln|det||)`.
pub fn log_space_agree(a: &SignLogDet, b: &SignLogDet) -> bool {
    if a.sign() != b.sign() {
        return false;
    }
    match (a.log_abs(), b.log_abs()) {
        (None, None) => true,
        (Some(la), Some(lb)) => (la - lb).abs() <= LOG_ATOL + LOG_RTOL * 1f64.max(la.abs().max(lb.abs())),
        _ => false,
    }
}

/// Adds `delta` to one entry of the materialized `G` before the oracle
/// factors it. Debug aid for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corruption {
    pub row: usize,
    pub col: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub mode: ScalarMode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "F")]
    pub f: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub closed_form: FactorReport,
    pub oracle: FactorReport,
    /// `|closed - oracle|` on plain values; `null` when not finite.
    pub abs_diff: Option<f64>,
    /// `|Δ ln|det||`; `0` when both are zero, `null` when exactly one is.
    pub log_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corruption: Option<Corruption>,
    pub passed: bool,
}

pub fn verify_instance<T: Scalar>(
    inst: &KronRankOneInstance<T>,
    cap: usize,
    corruption: Option<Corruption>,
) -> Result<VerificationRecord> {
    check_dense_cap(inst.nf(), cap)?;
    let closed = closed_form_det(inst).total;
    let mut g = materialize(inst);
    if let Some(c) = corruption {
        let current = g.get(c.row, c.col)?.clone();
        if !c.delta.is_finite() {
            return Err(Error::NonFinite { row: c.row, col: c.col });
        }
        g.set(c.row, c.col, current + T::from_f64_exact(c.delta))?;
    }
    let oracle = determinant(&g)?;

    let passed = match T::MODE {
        ScalarMode::Exact => closed.value == oracle.value,
        ScalarMode::Float => log_space_agree(&closed.sign_log, &oracle.sign_log),
    };
    let abs_diff = Some((closed.value.clone() - oracle.value.clone()).abs().to_f64()).filter(|d| d.is_finite());
    let log_diff = match (closed.sign_log.log_abs(), oracle.sign_log.log_abs()) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        (None, None) => Some(0.0),
        _ => None,
    };
    Ok(VerificationRecord {
        mode: T::MODE,
        n: inst.n(),
        f: inst.f(),
        label: None,
        closed_form: FactorReport::from_det(&closed),
        oracle: FactorReport::from_det(&oracle),
        abs_diff,
        log_diff,
        corruption,
        passed,
    })
}
