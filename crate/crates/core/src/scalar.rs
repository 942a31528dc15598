//! Scalar modes and the overflow-safe determinant carrier.
//!
//! Two scalar types implement [`Scalar`]: `f64` (FLOAT mode) and
//! [`BigRational`] (EXACT mode). Every pipeline is generic over one of them,
//! so mixing modes inside a computation does not type-check.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lu;
use crate::matrix::DenseMatrix;

/// Relative tolerance used by float-mode identity checks that have no
/// mode-specific policy of their own.
pub const FLOAT_IDENTITY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    /// IEEE-754 binary64.
    Float,
    /// Arbitrary-precision rationals.
    Exact,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Float => f.write_str("float"),
            ScalarMode::Exact => f.write_str("exact"),
        }
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "float" => Ok(ScalarMode::Float),
            "exact" => Ok(ScalarMode::Exact),
            other => Err(Error::Parse(format!("unknown scalar mode {other:?}"))),
        }
    }
}

/// A determinant as `(sign, ln|det|)`.
///
/// `sign == 0` means the determinant is zero; `log_abs` is then
/// `f64::NEG_INFINITY`, which is the only value it takes in that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignLogDet {
    sign: i8,
    log_abs: f64,
}

/// A plain `f64` view of a [`SignLogDet`] with range flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloatValue {
    pub value: f64,
    pub overflow: bool,
    pub underflow: bool,
}

impl SignLogDet {
    pub fn zero() -> Self {
        SignLogDet {
            sign: 0,
            log_abs: f64::NEG_INFINITY,
        }
    }

    pub fn one() -> Self {
        SignLogDet { sign: 1, log_abs: 0.0 }
    }

    /// Builds a nonzero determinant. `sign` must be `-1` or `+1` and
    /// `log_abs` finite; anything else yields zero.
    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || !log_abs.is_finite() {
            return Self::zero();
        }
        SignLogDet {
            sign: sign.signum(),
            log_abs,
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 || !v.is_finite() {
            return Self::zero();
        }
        Self::new(if v < 0.0 { -1 } else { 1 }, v.abs().ln())
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|det|`; `None` when the determinant is zero.
    pub fn log_abs(&self) -> Option<f64> {
        (self.sign != 0).then_some(self.log_abs)
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// `sign * exp(log_abs)`, flagging results outside the normal `f64` range.
    pub fn value(&self) -> FloatValue {
        if self.sign == 0 {
            return FloatValue {
                value: 0.0,
                overflow: false,
                underflow: false,
            };
        }
        let magnitude = self.log_abs.exp();
        let overflow = magnitude.is_infinite();
        let underflow = magnitude < f64::MIN_POSITIVE;
        FloatValue {
            value: f64::from(self.sign) * magnitude,
            overflow,
            underflow,
        }
    }

    pub fn mul(&self, other: &SignLogDet) -> SignLogDet {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(self.sign * other.sign, self.log_abs + other.log_abs)
    }

    /// `det^e`, carried as `e * ln|det|`.
    pub fn pow(&self, e: u32) -> SignLogDet {
        if e == 0 {
            return Self::one();
        }
        if self.is_zero() {
            return Self::zero();
        }
        let sign = if self.sign < 0 && e % 2 == 1 { -1 } else { 1 };
        Self::new(sign, f64::from(e) * self.log_abs)
    }
}

impl Serialize for SignLogDet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SignLogDet", 2)?;
        s.serialize_field("sign", &self.sign)?;
        s.serialize_field("log_abs", &self.log_abs())?;
        s.end()
    }
}

/// Determinant of one matrix: the overflow-safe form plus a plain scalar.
///
/// In EXACT mode `value` is the exact determinant. In FLOAT mode it is the
/// lossy `sign * exp(log_abs)` view and may be infinite or flushed to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Det<T> {
    pub sign_log: SignLogDet,
    pub value: T,
}

/// Field operations plus the mode-specific pieces (elimination, parsing,
/// tolerance) the rest of the crate needs.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static + Num + Neg<Output = Self> + Signed {
    const MODE: ScalarMode;

    /// Whether the value may be stored in a matrix (finite in FLOAT mode).
    fn is_admissible(&self) -> bool;

    /// Converts a finite `f64` without rounding in EXACT mode.
    fn from_f64_exact(v: f64) -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn sign_log(&self) -> SignLogDet;

    /// Determinant of a square matrix: LU with partial pivoting in FLOAT
    /// mode, fraction-free elimination in EXACT mode.
    fn determinant(m: &DenseMatrix<Self>) -> Det<Self>;

    /// Plain value of `prod_i factor_i ^ power_i`, whose overflow-safe form
    /// is `total`.
    fn product_value(factors: &[(&Self, u32)], total: &SignLogDet) -> Self;

    /// Identity check between two routes to the same quantity: equality in
    /// EXACT mode, `|a - b| <= rtol * max(|a|, |b|, scale)` in FLOAT mode.
    fn agrees_with(&self, other: &Self, scale: f64) -> bool;

    /// Parses `"p/q"`, an integer, or a decimal literal.
    fn parse_literal(text: &str) -> Result<Self>;

    fn to_json(&self) -> serde_json::Value;

    /// Human-readable rendering used in reports.
    fn to_text(&self) -> String;
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn is_admissible(&self) -> bool {
        self.is_finite()
    }

    fn from_f64_exact(v: f64) -> Self {
        v
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign_log(&self) -> SignLogDet {
        SignLogDet::from_value(*self)
    }

    fn determinant(m: &DenseMatrix<f64>) -> Det<f64> {
        let sign_log = lu::lu_float(m);
        Det {
            sign_log,
            value: sign_log.value().value,
        }
    }

    fn product_value(_factors: &[(&f64, u32)], total: &SignLogDet) -> f64 {
        total.value().value
    }

    fn agrees_with(&self, other: &f64, scale: f64) -> bool {
        let bound = self.abs().max(other.abs()).max(scale.abs());
        (self - other).abs() <= FLOAT_IDENTITY_RTOL * bound
    }

    fn parse_literal(text: &str) -> Result<f64> {
        let text = text.trim();
        let v = match text.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad_literal(text))?;
                let q: f64 = q.trim().parse().map_err(|_| bad_literal(text))?;
                if q == 0.0 {
                    return Err(bad_literal(text));
                }
                p / q
            }
            None => text.parse().map_err(|_| bad_literal(text))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(format!("non-finite literal {text:?}")))
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn to_text(&self) -> String {
        format!("{self:e}")
    }
}

impl Scalar for BigRational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn is_admissible(&self) -> bool {
        true
    }

    fn from_f64_exact(v: f64) -> Self {
        BigRational::from_float(v).expect("finite f64")
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or_else(|| self.sign_log().value().value)
    }

    fn sign_log(&self) -> SignLogDet {
        let sign = match self.numer().sign() {
            Sign::NoSign => return SignLogDet::zero(),
            Sign::Minus => -1,
            Sign::Plus => 1,
        };
        SignLogDet::new(sign, ln_abs_bigint(self.numer()) - ln_abs_bigint(self.denom()))
    }

    fn determinant(m: &DenseMatrix<BigRational>) -> Det<BigRational> {
        let value = lu::bareiss_rational(m);
        Det {
            sign_log: value.sign_log(),
            value,
        }
    }

    fn product_value(factors: &[(&BigRational, u32)], _total: &SignLogDet) -> BigRational {
        factors.iter().fold(BigRational::one(), |acc, (v, e)| {
            acc * num_traits::pow((*v).clone(), *e as usize)
        })
    }

    fn agrees_with(&self, other: &BigRational, _scale: f64) -> bool {
        self == other
    }

    fn parse_literal(text: &str) -> Result<BigRational> {
        parse_rational(text)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

fn bad_literal(text: &str) -> Error {
    Error::Parse(format!("invalid numeric literal {text:?}"))
}

/// `ln|v|` for a nonzero big integer, without converting the whole value to `f64`.
pub(crate) fn ln_abs_bigint(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (v.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parses `"p/q"`, `"p"`, or a decimal with optional exponent into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad_literal(text))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad_literal(text))?;
        if q.is_zero() {
            return Err(bad_literal(text));
        }
        return Ok(BigRational::new(p, q));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = text[pos + 1..].parse().map_err(|_| bad_literal(text))?;
            (&text[..pos], e)
        }
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad_literal(text));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad_literal(text));
    }
    if exponent.unsigned_abs() > 100_000 {
        return Err(bad_literal(text));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all_digits).map_err(|_| bad_literal(text))?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn zero_sentinel() {
        let z = SignLogDet::zero();
        assert_eq!(z.sign(), 0);
        assert_eq!(z.log_abs(), None);
        assert_eq!(SignLogDet::new(0, 3.0), z);
        assert_eq!(SignLogDet::from_value(0.0), z);
        assert_eq!(z.value().value, 0.0);
    }

    #[test]
    fn overflow_and_underflow_flags() {
        let big = SignLogDet::new(-1, 800.0).value();
        assert!(big.overflow && !big.underflow);
        assert_eq!(big.value, f64::NEG_INFINITY);
        let small = SignLogDet::new(1, -800.0).value();
        assert!(small.underflow && !small.overflow);
        let fine = SignLogDet::new(1, 2.0).value();
        assert!(!fine.overflow && !fine.underflow);
    }

    #[test]
    fn pow_and_mul() {
        let d = SignLogDet::from_value(-2.0);
        assert_eq!(d.pow(3).sign(), -1);
        assert!((d.pow(3).log_abs().unwrap() - 8f64.ln()).abs() < 1e-15);
        assert_eq!(d.pow(2).sign(), 1);
        assert_eq!(d.mul(&SignLogDet::zero()), SignLogDet::zero());
        assert_eq!(SignLogDet::zero().pow(0), SignLogDet::one());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("-1.5e2").unwrap(), q(-150, 1));
        assert_eq!(parse_rational("2.5E-1").unwrap(), q(1, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_literal("-2.5").unwrap(), -2.5);
        assert!(f64::parse_literal("inf").is_err());
        assert!(f64::parse_literal("1/0").is_err());
    }

    #[test]
    fn rational_sign_log_of_huge_values() {
        let huge = BigRational::from_integer(num_traits::pow(BigInt::from(10), 400));
        let sl = huge.sign_log();
        assert_eq!(sl.sign(), 1);
        let expected = 400.0 * 10f64.ln();
        assert!((sl.log_abs().unwrap() - expected).abs() < 1e-12 * expected);
        assert!(sl.value().overflow);
        let tiny = q(-1, 3).sign_log();
        assert_eq!(tiny.sign(), -1);
        assert!((tiny.log_abs().unwrap() + 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sign_log_serializes_null_log_for_zero() {
        let json = serde_json::to_string(&SignLogDet::zero()).unwrap();
        assert_eq!(json, r#"{"sign":0,"log_abs":null}"#);
    }
}
