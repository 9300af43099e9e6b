//! Recovering the free constant `C` from a far orbit sample.
//!
//! Setting the series equal to the orbit value `u_K` gives a low-degree
//! polynomial equation in `C`; its real root nearest the leading-defect
//! guess `(u_K − series|_{C=0})·K^{3/2}` is the estimate. Repeating across
//! checkpoints shows whether the estimates settle or drift.

use serde::{Deserialize, Serialize};

use crate::asymseries::{asym_eval_poly, AsymSeries, CPoly};
use crate::error::{Error, Result};
use crate::numerics::{digits_agreement, format_decimal, safeguarded_newton, BigReal};
use crate::orbit::OrbitResult;

/// Smallest index accepted for extraction.
pub const MIN_INDEX: u64 = 100;

/// Final agreement (in digits) needed for a stable verdict.
pub const STABLE_DIGITS: u32 = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantEstimate {
    pub c: BigReal,
    pub k: u64,
    /// `|series(K; C) − u_K|` at the returned root.
    pub poly_residual: BigReal,
    pub series_cutoff_halves: u32,
    pub initial_guess: BigReal,
}

/// Solves `series(K; C) = value` for `C`.
pub fn extract_constant(series: &AsymSeries, k: u64, value: &BigReal, prec: u32) -> Result<ConstantEstimate> {
    if k < MIN_INDEX {
        return Err(Error::Precondition(format!("extraction needs K ≥ {MIN_INDEX}, got {k}")));
    }
    if series.get(3, 0).and_then(|c| c.degree()).unwrap_or(0) == 0 {
        return Err(Error::Precondition("series has no free constant at k^(-3/2)".into()));
    }
    let poly = asym_eval_poly(series, k)?;
    let poly = CPoly::new(poly.coeffs().iter().map(|c| c.with_prec(prec)).collect());
    let value = value.with_prec(prec);
    let derivative = CPoly::new(
        poly.coeffs().iter().enumerate().skip(1).map(|(d, c)| c.mul_int(d as i64)).collect(),
    );
    let k_32 = BigReal::from_int(k as i64, prec).powi(3).sqrt()?;
    let zero = BigReal::zero(prec);
    let initial_guess = &(&value - &poly.eval(&zero)) * &k_32;

    // Scaling by K^{3/2} makes the equation O(1) in C.
    let g = |c: &BigReal| -> Result<(BigReal, BigReal)> {
        Ok((&(&poly.eval(c) - &value) * &k_32, &derivative.eval(c) * &k_32))
    };
    let lo = initial_guess.add_int(-1);
    let hi = initial_guess.add_int(1);
    let scale = BigReal::max_abs(&initial_guess, &BigReal::one(prec)).abs();
    let tol = &BigReal::pow2(-(prec as i32 - 8), prec) * &scale;
    let c = safeguarded_newton(g, &lo, &hi, &initial_guess, &tol, 4 * prec as usize).map_err(|e| match e {
        Error::NoConvergence(_) => Error::NoConvergence(format!(
            "no real root within 1 of the initial guess {} at K = {k}",
            format_decimal(&initial_guess, 12)
        )),
        other => other,
    })?;
    let poly_residual = (&poly.eval(&c) - &value).abs();
    Ok(ConstantEstimate { c, k, poly_residual, series_cutoff_halves: series.cutoff_halves(), initial_guess })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Drifting,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub estimates: Vec<ConstantEstimate>,
    /// Checkpoints whose extraction failed, with the reason.
    pub failures: Vec<(u64, String)>,
    /// `(K_lo, K_hi, digits)` for consecutive successful estimates.
    pub agreed_digits: Vec<(u64, u64, u32)>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityJson {
    pub verdict: Verdict,
    pub estimates: Vec<EstimateJson>,
    pub agreed_digits: Vec<AgreementJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateJson {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "C")]
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgreementJson {
    #[serde(rename = "K_lo")]
    pub k_lo: u64,
    #[serde(rename = "K_hi")]
    pub k_hi: u64,
    pub digits: u32,
}

impl StabilityReport {
    pub fn final_estimate(&self) -> Option<&ConstantEstimate> {
        self.estimates.last()
    }

    pub fn to_json(&self, digits: usize) -> StabilityJson {
        StabilityJson {
            verdict: self.verdict,
            estimates: self
                .estimates
                .iter()
                .map(|e| EstimateJson { k: e.k, c: format_decimal(&e.c, digits) })
                .collect(),
            agreed_digits: self
                .agreed_digits
                .iter()
                .map(|&(k_lo, k_hi, digits)| AgreementJson { k_lo, k_hi, digits })
                .collect(),
        }
    }
}

/// Extracts `C` at every orbit checkpoint with `K ≥ 100` and judges whether
/// the estimates settle.
///
/// Stable iff the digits shared by consecutive estimates never decrease and
/// the last pair shares at least [`STABLE_DIGITS`].
pub fn stability_scan(series: &AsymSeries, orbit: &OrbitResult) -> Result<StabilityReport> {
    let samples: Vec<&(u64, BigReal)> = orbit.samples.iter().filter(|(k, _)| *k >= MIN_INDEX).collect();
    if samples.len() < 3 {
        return Err(Error::Precondition("stability scan needs at least 3 checkpoints with K ≥ 100".into()));
    }
    let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
    if last < first.saturating_mul(100) {
        return Err(Error::Precondition("stability scan checkpoints must span at least two decades".into()));
    }
    let prec = orbit.precision_bits;
    let outcomes: Vec<(u64, Result<ConstantEstimate>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = samples
            .iter()
            .map(|&(k, value)| (*k, scope.spawn(move || extract_constant(series, *k, value, prec))))
            .collect();
        handles
            .into_iter()
            .map(|(k, h)| (k, h.join().unwrap_or_else(|_| Err(Error::NoConvergence("extraction panicked".into())))))
            .collect()
    });

    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (k, outcome) in outcomes {
        match outcome {
            Ok(e) => estimates.push(e),
            Err(e) => {
                failures.push((k, e.to_string()));
                first_error.get_or_insert(e);
            }
        }
    }
    if estimates.is_empty() {
        return Err(first_error.expect("at least one failure"));
    }
    // digits past the extraction tolerance are noise and must not decide
    // the verdict
    let cap = (f64::from(prec.saturating_sub(48)) * std::f64::consts::LOG10_2).floor() as u32;
    let agreed_digits: Vec<(u64, u64, u32)> = estimates
        .windows(2)
        .map(|w| (w[0].k, w[1].k, digits_agreement(&w[0].c, &w[1].c).min(cap)))
        .collect();
    let nondecreasing = agreed_digits.windows(2).all(|w| w[0].2 <= w[1].2);
    let settled = agreed_digits.last().is_some_and(|a| a.2 >= STABLE_DIGITS);
    let verdict = if nondecreasing && settled { Verdict::Stable } else { Verdict::Drifting };
    Ok(StabilityReport { estimates, failures, agreed_digits, verdict })
}
