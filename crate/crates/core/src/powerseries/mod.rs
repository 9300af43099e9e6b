//! Truncated formal power series with [`BigReal`] coefficients.
//!
//! A series of truncation degree `n` stores the coefficients of
//! `x^0 ..= x^n`; every result is reliable only through the smallest
//! truncation degree among its inputs.

mod elementary;
mod mapspec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{format_decimal, BigReal};

pub use elementary::{ps_elementary, Elementary};
pub use mapspec::{taylor_at_fixed_point, FixedPointTag, MapEvaluator, MapKind, MapSpec, Orientation};

/// Truncated power series `Σ coeffs[n] x^n + O(x^(trunc_degree+1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<BigReal>,
}

/// Binary operations accepted by [`ps_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    /// `a(b(x))`; `b` must have a zero constant term.
    Compose,
    /// `a / b`; `b` must have a nonzero constant term.
    Divide,
}

pub fn ps_arith(a: &PowerSeries, b: &PowerSeries, op: SeriesOp) -> Result<PowerSeries> {
    match op {
        SeriesOp::Add => Ok(a.add(b)),
        SeriesOp::Sub => Ok(a.sub(b)),
        SeriesOp::Mul => Ok(a.mul(b)),
        SeriesOp::Compose => a.compose(b),
        SeriesOp::Divide => a.div(b),
    }
}

impl PowerSeries {
    /// Builds a series from its coefficients; the truncation degree is
    /// `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigReal>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("a power series needs at least one coefficient".into()));
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn zero(degree: usize, prec: u32) -> Self {
        PowerSeries { coeffs: vec![BigReal::zero(prec); degree + 1] }
    }

    /// The series `x` truncated at `degree`.
    pub fn identity(degree: usize, prec: u32) -> Self {
        let mut s = Self::zero(degree, prec);
        if degree >= 1 {
            s.coeffs[1] = BigReal::one(prec);
        }
        s
    }

    pub fn constant(c: BigReal, degree: usize) -> Self {
        let prec = c.prec();
        let mut s = Self::zero(degree, prec);
        s.coeffs[0] = c;
        s
    }

    /// Exact small-integer coefficients, ascending.
    pub fn from_ints(coeffs: &[i64], prec: u32) -> Self {
        PowerSeries { coeffs: coeffs.iter().map(|&c| BigReal::from_int(c, prec)).collect() }
    }

    /// Rational coefficients `(num, den)`, ascending.
    pub fn from_ratios(coeffs: &[(i64, i64)], prec: u32) -> Self {
        PowerSeries { coeffs: coeffs.iter().map(|&(n, d)| BigReal::from_ratio(n, d, prec)).collect() }
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigReal] {
        &self.coeffs
    }

    /// Coefficient of `x^n`, or zero beyond the stored range.
    pub fn coeff(&self, n: usize) -> BigReal {
        self.coeffs.get(n).cloned().unwrap_or_else(|| BigReal::zero(self.prec()))
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(BigReal::prec).min().expect("nonempty")
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let mut coeffs: Vec<_> = self.coeffs.iter().take(degree + 1).cloned().collect();
        let prec = self.prec();
        coeffs.resize(degree + 1, BigReal::zero(prec));
        PowerSeries { coeffs }
    }

    /// Replaces coefficient `n` (which must be within the truncation degree).
    pub fn with_coeff(&self, n: usize, c: BigReal) -> Self {
        let mut s = self.clone();
        s.coeffs[n] = c;
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.trunc_degree().min(other.trunc_degree());
        PowerSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.trunc_degree().min(other.trunc_degree());
        PowerSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect() }
    }

    pub fn scale(&self, c: &BigReal) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.trunc_degree().min(other.trunc_degree());
        let prec = self.prec().min(other.prec());
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(BigReal::zero(prec), |acc, i| {
                    if self.coeffs[i].is_zero() || other.coeffs[k - i].is_zero() {
                        acc
                    } else {
                        acc + &self.coeffs[i] * &other.coeffs[k - i]
                    }
                })
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// `self(inner(x))`. The inner series must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Precondition("composition inner series has a nonzero constant term".into()));
        }
        let n = self.trunc_degree().min(inner.trunc_degree());
        let inner = inner.truncate(n);
        let mut acc = PowerSeries::constant(self.coeffs[n].clone(), n);
        for c in self.coeffs[..n].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = &acc.coeffs[0] + c;
        }
        Ok(acc)
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let b0 = &self.coeffs[0];
        if b0.is_zero() {
            return Err(Error::Precondition("reciprocal of a series with zero constant term".into()));
        }
        let n = self.trunc_degree();
        let prec = self.prec();
        let mut out: Vec<BigReal> = Vec::with_capacity(n + 1);
        out.push(&BigReal::one(prec) / b0);
        for k in 1..=n {
            let s = (1..=k).fold(BigReal::zero(prec), |acc, i| acc + &self.coeffs[i] * &out[k - i]);
            out.push(-(&s / b0));
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// `self / divisor`.
    pub fn div(&self, divisor: &Self) -> Result<Self> {
        Ok(self.mul(&divisor.reciprocal()?))
    }

    /// Evaluates the truncated polynomial at `x` (Horner).
    pub fn eval(&self, x: &BigReal) -> BigReal {
        let mut acc = self.coeffs[self.trunc_degree()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> BigReal {
        self.coeffs.iter().fold(BigReal::zero(self.prec()), |m, c| {
            if c.cmp_abs(&m).is_gt() {
                c.abs()
            } else {
                m
            }
        })
    }

    /// Compositional inverse `t` with `self(t(x)) = x` through the truncation
    /// degree. Requires a zero constant term and a nonzero linear term.
    pub fn reversion(&self) -> Result<Self> {
        ps_reversion(self)
    }

    pub fn to_json(&self, digits: usize) -> PowerSeriesJson {
        PowerSeriesJson {
            trunc_degree: self.trunc_degree(),
            coeffs: self.coeffs.iter().map(|c| format_decimal(c, digits)).collect(),
        }
    }

    pub fn from_json(doc: &PowerSeriesJson, prec: u32) -> Result<Self> {
        if doc.coeffs.len() != doc.trunc_degree + 1 {
            return Err(Error::Format(format!(
                "series declares trunc_degree {} but has {} coefficients",
                doc.trunc_degree,
                doc.coeffs.len()
            )));
        }
        let coeffs = doc.coeffs.iter().map(|s| BigReal::parse(s, prec)).collect::<Result<Vec<_>>>()?;
        PowerSeries::new(coeffs)
    }
}

/// Serialized form: `{ "trunc_degree": n, "coeffs": [decimal strings] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSeriesJson {
    pub trunc_degree: usize,
    pub coeffs: Vec<String>,
}

/// Compositional inverse, solved one degree at a time: after the first `n-1`
/// coefficients of `t` are fixed, the `x^n` coefficient of `s(t(x))` is
/// affine in `t_n` with slope `s_1`.
pub fn ps_reversion(s: &PowerSeries) -> Result<PowerSeries> {
    if !s.coeffs[0].is_zero() {
        return Err(Error::Precondition("reversion needs a zero constant term".into()));
    }
    let n = s.trunc_degree();
    if n < 1 || s.coeffs[1].is_zero() {
        return Err(Error::Precondition("reversion needs a nonzero linear term".into()));
    }
    let prec = s.prec();
    let s1 = &s.coeffs[1];
    let mut t = PowerSeries::zero(n, prec);
    t.coeffs[1] = &BigReal::one(prec) / s1;
    for k in 2..=n {
        let defect = s.truncate(k).compose(&t.truncate(k))?.coeffs[k].clone();
        t.coeffs[k] = -(&defect / s1);
    }
    Ok(t)
}

/// `x ↦ -s(-x)`: the coefficient of `x^n` picks up `(-1)^(n+1)`.
pub fn kindred_transform(s: &PowerSeries) -> PowerSeries {
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == 0 { -c } else { c.clone() })
        .collect();
    PowerSeries { coeffs }
}
