//! Coefficient matching for gap-2 maps `x − a x³ + b x⁴ + …`.
//!
//! The orbit is expanded as `Σ q_{h,j}(C) ln(k)^j k^(-h/2)` and the
//! coefficients are fixed by requiring `series(k+1) = map(series(k))`
//! order by order. In the residual `shift(series) − map(series)` an unknown
//! `q_{h,j}` first appears at order `h+2`: with slope `(3−h)/2` at log power
//! `j`, and slope `j` at log power `j−1` (from the expansion of `ln(k+1)`).
//! This makes the system triangular:
//!
//! * `q_{1,0} = 1/√(2a)` closes the leading nonlinear equation;
//! * for `h ≠ 3`, `q_{h,j}` is read off the `(h+2, j)` equation, highest `j`
//!   first;
//! * at `h = 3` the slope `(3−h)/2` vanishes, so `q_{3,0} = C` is free and
//!   each `q_{3,j}` (`j ≥ 1`) is read off the `(5, j−1)` equation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::asymseries::{
    logpow_cap, shift_reexpand, substitute_into_map, AsymSeries, AsymSeriesJson, CPoly,
};
use crate::error::{Error, Result};
use crate::numerics::{format_decimal, BigReal};
use crate::powerseries::PowerSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finality {
    /// Unaffected by map terms beyond the truncation degree.
    Final,
    /// May still change when higher-degree map terms are included.
    Transient,
}

/// Solved expansion with its verification data.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub series: AsymSeries,
    pub finality: BTreeMap<(u32, u32), Finality>,
    pub residual_max: BigReal,
    /// Truncation degree of the local map the solve was based on.
    pub map_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionJson {
    pub series: AsymSeriesJson,
    pub finality: Vec<FinalityJson>,
    pub residual_max: String,
    pub map_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalityJson {
    pub halves: u32,
    pub logpow: u32,
    pub status: Finality,
}

impl ExpansionResult {
    pub fn to_json(&self, digits: usize) -> ExpansionJson {
        ExpansionJson {
            series: self.series.to_json(digits),
            finality: self
                .finality
                .iter()
                .map(|(&(halves, logpow), &status)| FinalityJson { halves, logpow, status })
                .collect(),
            residual_max: format_decimal(&self.residual_max, 6),
            map_degree: self.map_degree,
        }
    }

    /// Coefficient at `(h, j)`; the zero polynomial when absent.
    pub fn coeff(&self, halves: u32, logpow: u32) -> CPoly {
        self.series.get(halves, logpow).cloned().unwrap_or_else(CPoly::zero)
    }
}

/// Residual tolerance `2^-(prec−48)` for a successful solve.
pub fn residual_tolerance(prec: u32) -> BigReal {
    BigReal::pow2(-(prec as i32 - 48), prec)
}

/// Solves for the orbit expansion of `local_map` through `cutoff_halves`.
///
/// Map coefficients beyond the truncation degree are taken as zero, so a
/// truncated Taylor fit is treated as the map itself; `(h, j)` is marked
/// final iff the truncation degree is at least `h + 2`.
pub fn solve_expansion(local_map: &PowerSeries, cutoff_halves: u32, prec: u32) -> Result<ExpansionResult> {
    if cutoff_halves < 3 {
        return Err(Error::Precondition("expansion cutoff must be at least 3".into()));
    }
    let map_degree = local_map.trunc_degree();
    let map = gap2_model(local_map, cutoff_halves as usize + 2, prec)?;
    let a = -&map.coeff(3);

    // round-off in a C-degree that cancels exactly would otherwise inflate
    // the polynomial degree
    let chop = BigReal::pow2(-(prec as i32 - 64), prec);
    let mut series = AsymSeries::new(cutoff_halves);
    let q1 = (&BigReal::one(prec) / &a.mul_int(2)).sqrt()?;
    series.insert(1, 0, CPoly::constant(q1))?;

    for h in 2..=cutoff_halves {
        let cap = logpow_cap(h);
        if h == 3 {
            series.insert(3, 0, CPoly::c_monomial(prec))?;
            for j in (1..=cap).rev() {
                let r = residual_at(&map, &series, 5, j - 1)?;
                series.insert(3, j, r.scale(&BigReal::from_int(-(j as i64), prec).powi(-1)).chop(&chop))?;
            }
            continue;
        }
        let slope = BigReal::from_ratio(3 - i64::from(h), 2, prec);
        for j in (0..=cap).rev() {
            let r = residual_at(&map, &series, h + 2, j)?;
            series.insert(h, j, r.scale(&(&BigReal::from_int(-1, prec) / &slope)).chop(&chop))?;
        }
    }

    let residual_max = residual_max(&map, &series)?;
    if residual_max >= residual_tolerance(prec) {
        return Err(Error::Singular(format!(
            "matching left residual {} above tolerance",
            format_decimal(&residual_max, 6)
        )));
    }
    let finality = (1..=cutoff_halves)
        .flat_map(|h| (0..=logpow_cap(h)).map(move |j| (h, j)))
        .map(|(h, j)| {
            let status = if map_degree >= h as usize + 2 { Finality::Final } else { Finality::Transient };
            ((h, j), status)
        })
        .collect();
    Ok(ExpansionResult { series, finality, residual_max, map_degree })
}

/// Largest coefficient (over terms and `C`-degrees) of
/// `shift(series) − map(series)` through `cutoff + 2`, the last order at
/// which every solved coefficient has entered.
pub fn residual_report(local_map: &PowerSeries, series: &AsymSeries) -> Result<BigReal> {
    let prec = series.prec().unwrap_or_else(|| local_map.prec());
    if series.is_empty() {
        return Ok(BigReal::zero(prec));
    }
    let map = gap2_model(local_map, series.cutoff_halves() as usize + 2, prec)?;
    residual_max(&map, series)
}

fn residual_max(map: &PowerSeries, series: &AsymSeries) -> Result<BigReal> {
    let prec = series.prec().unwrap_or_else(|| map.prec());
    Ok(residual(map, series, series.cutoff_halves() + 2)?.max_abs_coeff(prec))
}

fn residual(map: &PowerSeries, series: &AsymSeries, through: u32) -> Result<AsymSeries> {
    let shifted = shift_reexpand(series, through)?;
    let mapped = substitute_into_map(map, series, through)?;
    Ok(shifted.sub(&mapped))
}

/// Residual coefficient at `(order, logpow)` with the series truncated to
/// what can influence that order.
fn residual_at(map: &PowerSeries, series: &AsymSeries, order: u32, logpow: u32) -> Result<CPoly> {
    let relevant = series.truncate(order - 2);
    let relevant = AsymSeries::from_terms(order, relevant.terms())?;
    Ok(residual(map, &relevant, order)?.get(order, logpow).cloned().unwrap_or_else(CPoly::zero))
}

/// Checks the gap-2 shape and returns the map at `prec`, padded with zeros
/// to `degree`, with `c0 = 0`, `c1 = 1`, `c2 = 0` made exact.
fn gap2_model(local_map: &PowerSeries, degree: usize, prec: u32) -> Result<PowerSeries> {
    if local_map.trunc_degree() < 3 {
        return Err(Error::Precondition("a gap-2 map needs its cubic coefficient".into()));
    }
    let tol = BigReal::pow2(-(prec.min(local_map.prec()) as i32 - 16), prec);
    let c = |n: usize| local_map.coeff(n).with_prec(prec);
    if c(0).abs() >= tol {
        return Err(Error::Precondition("local map must fix 0".into()));
    }
    if c(1).add_int(-1).abs() >= tol {
        return Err(Error::Precondition(format!(
            "linear coefficient {} is not 1",
            format_decimal(&c(1), 12)
        )));
    }
    if c(2).abs() >= tol {
        return Err(Error::Unsupported(format!(
            "quadratic coefficient {} is nonzero (not a gap-2 map)",
            format_decimal(&c(2), 12)
        )));
    }
    if !(-&c(3)).is_positive() || c(3).abs() < tol {
        return Err(Error::Unsupported(format!(
            "cubic coefficient {} must be negative",
            format_decimal(&c(3), 12)
        )));
    }
    let mut coeffs: Vec<BigReal> = (0..=degree)
        .map(|n| if n <= local_map.trunc_degree() { c(n) } else { BigReal::zero(prec) })
        .collect();
    coeffs[0] = BigReal::zero(prec);
    coeffs[1] = BigReal::one(prec);
    coeffs[2] = BigReal::zero(prec);
    PowerSeries::new(coeffs)
}
