//! Arbitrary-precision real scalar used by every other module.
//!
//! [`BigReal`] wraps an MPFR float. Each value carries its own precision and
//! binary operations round to the smaller of the two operand precisions, so a
//! low-precision input can never silently masquerade as a high-precision
//! result. Non-finite values cannot be constructed.

mod decimal;
mod root;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

pub use decimal::{digits_agreement, format_decimal, format_truncated};
pub use root::safeguarded_newton;

/// Guard bits added on top of the bits needed for the requested digits.
pub const GUARD_BITS: u32 = 64;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision for `digits` output digits: `⌈digits·log2 10⌉ + 64`.
pub fn precision_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32 + GUARD_BITS
}

/// Immutable arbitrary-precision real number with an explicit binary precision.
#[derive(Clone)]
pub struct BigReal(Float);

impl BigReal {
    pub(crate) fn from_float(f: Float) -> Result<Self> {
        if f.is_finite() {
            Ok(BigReal(f))
        } else {
            Err(Error::NonFinite(format!("{f}")))
        }
    }

    /// Wraps a float known to be finite; panics otherwise.
    pub(crate) fn wrap(f: Float) -> Self {
        assert!(f.is_finite(), "arithmetic produced a non-finite value");
        BigReal(f)
    }

    pub(crate) fn as_float(&self) -> &Float {
        &self.0
    }

    pub(crate) fn into_float(self) -> Float {
        self.0
    }

    pub fn zero(prec: u32) -> Self {
        BigReal(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        BigReal(Float::with_val(prec, v))
    }

    /// `num / den` rounded once to `prec`.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        assert!(den != 0, "zero denominator");
        let q = rug::Rational::from((num, den));
        BigReal(Float::with_val(prec, &q))
    }

    pub fn from_f64(v: f64, prec: u32) -> Result<Self> {
        Self::from_float(Float::with_val(prec, v))
    }

    /// Parses a decimal literal (`-0.25`, `1e-3`) or an exact ratio (`1/12`).
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = Self::parse(n, prec + 16)?;
            let d = Self::parse(d, prec + 16)?;
            if d.is_zero() {
                return Err(Error::Parse(s.to_string()));
            }
            return Ok((&n / &d).with_prec(prec));
        }
        let parsed = Float::parse(s).map_err(|_| Error::Parse(s.to_string()))?;
        Self::from_float(Float::with_val(prec, parsed))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Rounds (or exactly widens) to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigReal(Float::with_val(prec, &self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_positive()
    }

    /// Sign as an ordering against zero.
    pub fn sign(&self) -> Ordering {
        self.0.cmp0().expect("finite")
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn square(&self) -> Self {
        BigReal(self.0.clone().square())
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain(format!("sqrt of negative {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().sqrt()))
    }

    pub fn ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::Domain(format!("ln of non-positive {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().ln()))
    }

    /// `ln(1 + x)`, accurate for tiny `x`.
    pub fn ln_1p(&self) -> Result<Self> {
        if self.0 <= -1 {
            return Err(Error::Domain(format!("ln(1+x) at x = {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().ln_1p()))
    }

    pub fn exp(&self) -> Self {
        Self::wrap(self.0.clone().exp())
    }

    pub fn cos(&self) -> Self {
        BigReal(self.0.clone().cos())
    }

    pub fn sin(&self) -> Self {
        BigReal(self.0.clone().sin())
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::wrap(self.0.clone().pow(n))
    }

    /// `ln(n)` for a positive integer, at `prec`.
    pub fn ln_u64(n: u64, prec: u32) -> Self {
        assert!(n > 0, "ln of zero");
        BigReal(Float::with_val(prec, n).ln())
    }

    pub fn mul_int(&self, k: i64) -> Self {
        BigReal(Float::with_val(self.prec(), &self.0 * k))
    }

    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        BigReal(Float::with_val(self.prec(), &self.0 / k))
    }

    pub fn add_int(&self, k: i64) -> Self {
        BigReal(Float::with_val(self.prec(), &self.0 + k))
    }

    /// Division that reports a zero divisor instead of panicking.
    pub fn checked_div(&self, rhs: &BigReal) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, other: &BigReal) -> Ordering {
        self.0.cmp_abs(&other.0).expect("finite")
    }

    pub fn max_abs<'a>(a: &'a BigReal, b: &'a BigReal) -> &'a BigReal {
        if a.cmp_abs(b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    /// `2^e` at `prec`.
    pub fn pow2(e: i32, prec: u32) -> Self {
        BigReal(Float::with_val(prec, Float::u_exp(1, e)))
    }

    /// Decimal string rounded to `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        format_decimal(self, digits)
    }

    pub(crate) fn to_sign_string_exp(&self, digits: usize, round: Round) -> (bool, String, Option<i32>) {
        self.0.to_sign_string_exp_round(10, Some(digits), round)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((f64::from(self.prec()) / LOG2_10) as usize).max(1);
        write!(f, "{}[{}]", format_decimal(self, digits), self.prec())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((f64::from(self.prec()) / LOG2_10) as usize).max(1));
        f.write_str(&format_decimal(self, digits))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<i64> for BigReal {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for BigReal {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let prec = self.prec().min(rhs.prec());
                BigReal::wrap(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                &self $op &rhs
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                &self $op rhs
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(Float::with_val(self.prec(), -&self.0))
    }
}
