//! Asymptotic series over the basis `ln(k)^j · k^(-h/2)` with coefficients
//! polynomial in a free constant `C`.
//!
//! An [`AsymSeries`] only holds decaying terms (`h ≥ 1`) and enforces the
//! logarithm cap `j ≤ ⌊(h−1)/2⌋` together with the matching bound on the
//! `C`-degree of each coefficient. A [`GrowthSeries`] also admits constant
//! and growing terms; it is the shape of reciprocals.

mod cpoly;
mod shift;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{format_decimal, BigReal, GUARD_BITS};
use crate::powerseries::PowerSeries;

pub use cpoly::CPoly;
pub use shift::shift_reexpand;

/// Internal term store keyed by `(halves, logpow)`.
pub(crate) type Terms = BTreeMap<(i32, u32), CPoly>;

/// Largest admissible log power (and `C`-degree) at exponent `h/2`.
pub fn logpow_cap(halves: u32) -> u32 {
    halves.saturating_sub(1) / 2
}

/// One term `coeff · ln(k)^logpow · k^(-halves/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymTerm {
    pub halves: u32,
    pub logpow: u32,
    pub coeff: CPoly,
}

/// Finite asymptotic series in decaying terms, truncated at `cutoff_halves`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymSeries {
    terms: BTreeMap<(u32, u32), CPoly>,
    cutoff_halves: u32,
}

impl AsymSeries {
    pub fn new(cutoff_halves: u32) -> Self {
        AsymSeries { terms: BTreeMap::new(), cutoff_halves }
    }

    /// Builds a series from terms; fails on any invariant violation.
    pub fn from_terms(cutoff_halves: u32, terms: impl IntoIterator<Item = AsymTerm>) -> Result<Self> {
        let mut s = Self::new(cutoff_halves);
        for t in terms {
            s.insert(t.halves, t.logpow, t.coeff)?;
        }
        Ok(s)
    }

    /// Sets the coefficient at `(halves, logpow)`; a zero coefficient removes
    /// the term.
    pub fn insert(&mut self, halves: u32, logpow: u32, coeff: CPoly) -> Result<()> {
        if halves == 0 {
            return Err(Error::Precondition("asymptotic series terms must decay (h ≥ 1)".into()));
        }
        if halves > self.cutoff_halves {
            return Err(Error::Precondition(format!(
                "term at h = {halves} beyond cutoff {}",
                self.cutoff_halves
            )));
        }
        let cap = logpow_cap(halves);
        if logpow > cap {
            return Err(Error::CapExceeded(format!("ln(k)^{logpow} at h = {halves} exceeds cap {cap}")));
        }
        if coeff.degree().is_some_and(|d| d as u32 > cap) {
            return Err(Error::CapExceeded(format!(
                "C-degree {} at h = {halves} exceeds cap {cap}",
                coeff.degree().unwrap_or(0)
            )));
        }
        if coeff.is_zero() {
            self.terms.remove(&(halves, logpow));
        } else {
            self.terms.insert((halves, logpow), coeff);
        }
        Ok(())
    }

    pub(crate) fn from_internal(cutoff_halves: u32, terms: Terms) -> Result<Self> {
        let mut s = Self::new(cutoff_halves);
        for ((h, j), c) in terms {
            if h < 1 {
                return Err(Error::Precondition(format!("non-decaying term at h = {h}")));
            }
            if h as u32 <= cutoff_halves {
                s.insert(h as u32, j, c)?;
            }
        }
        Ok(s)
    }

    pub(crate) fn to_internal(&self) -> Terms {
        self.terms.iter().map(|(&(h, j), c)| ((h as i32, j), c.clone())).collect()
    }

    pub fn cutoff_halves(&self) -> u32 {
        self.cutoff_halves
    }

    pub fn get(&self, halves: u32, logpow: u32) -> Option<&CPoly> {
        self.terms.get(&(halves, logpow))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms sorted by `(halves, logpow)`.
    pub fn terms(&self) -> impl Iterator<Item = AsymTerm> + '_ {
        self.terms.iter().map(|(&(halves, logpow), c)| AsymTerm { halves, logpow, coeff: c.clone() })
    }

    /// Smallest `h` present.
    pub fn leading_halves(&self) -> Option<u32> {
        self.terms.keys().next().map(|&(h, _)| h)
    }

    pub fn prec(&self) -> Option<u32> {
        self.terms.values().flat_map(|c| c.coeffs().iter().map(BigReal::prec)).min()
    }

    /// Drops every term above `cutoff` and lowers the cutoff.
    pub fn truncate(&self, cutoff: u32) -> Self {
        let terms = self.terms.iter().filter(|(&(h, _), _)| h <= cutoff).map(|(k, c)| (*k, c.clone())).collect();
        AsymSeries { terms, cutoff_halves: cutoff.min(self.cutoff_halves) }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, CPoly::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, CPoly::sub)
    }

    fn combine(&self, other: &Self, f: impl Fn(&CPoly, &CPoly) -> CPoly) -> Self {
        let cutoff = self.cutoff_halves.min(other.cutoff_halves);
        let mut terms = BTreeMap::new();
        let zero = CPoly::zero();
        for key in self.terms.keys().chain(other.terms.keys()) {
            if key.0 > cutoff || terms.contains_key(key) {
                continue;
            }
            let c = f(self.terms.get(key).unwrap_or(&zero), other.terms.get(key).unwrap_or(&zero));
            if !c.is_zero() {
                terms.insert(*key, c);
            }
        }
        AsymSeries { terms, cutoff_halves: cutoff }
    }

    pub fn scale(&self, a: &BigReal) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (*k, c.scale(a)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        AsymSeries { terms, cutoff_halves: self.cutoff_halves }
    }

    /// Largest coefficient magnitude over all terms and `C`-degrees.
    pub fn max_abs_coeff(&self, prec: u32) -> BigReal {
        self.terms.values().fold(BigReal::zero(prec), |m, c| {
            let a = c.max_abs(prec);
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn to_json(&self, digits: usize) -> AsymSeriesJson {
        AsymSeriesJson {
            cutoff_halves: i64::from(self.cutoff_halves),
            terms: terms_to_json(self.terms.iter().map(|(&(h, j), c)| (h as i32, j, c)), digits),
        }
    }

    pub fn from_json(doc: &AsymSeriesJson, prec: u32) -> Result<Self> {
        let cutoff = u32::try_from(doc.cutoff_halves)
            .map_err(|_| Error::Format(format!("cutoff_halves {} is negative", doc.cutoff_halves)))?;
        let mut s = Self::new(cutoff);
        for t in &doc.terms {
            let h = u32::try_from(t.halves).map_err(|_| Error::Format(format!("halves {} < 0", t.halves)))?;
            s.insert(h, t.logpow, parse_cpoly(&t.cpoly, prec)?)?;
        }
        Ok(s)
    }
}

/// Series that may contain constant and growing terms (`halves ≤ 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSeries {
    terms: BTreeMap<(i32, u32), CPoly>,
    cutoff_halves: i32,
}

impl GrowthSeries {
    pub fn cutoff_halves(&self) -> i32 {
        self.cutoff_halves
    }

    pub fn get(&self, halves: i32, logpow: u32) -> Option<&CPoly> {
        self.terms.get(&(halves, logpow))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, u32, &CPoly)> + '_ {
        self.terms.iter().map(|(&(h, j), c)| (h, j, c))
    }

    /// Most negative `halves` present (the fastest-growing term).
    pub fn leading_halves(&self) -> Option<i32> {
        self.terms.keys().next().map(|&(h, _)| h)
    }

    pub fn eval(&self, k: u64, c_value: &BigReal) -> Result<BigReal> {
        eval_terms(self.terms.iter().map(|(&(h, j), c)| (h, j, c)), k, c_value)
    }

    pub fn to_json(&self, digits: usize) -> AsymSeriesJson {
        AsymSeriesJson {
            cutoff_halves: i64::from(self.cutoff_halves),
            terms: terms_to_json(self.terms.iter().map(|(&(h, j), c)| (h, j, c)), digits),
        }
    }
}

/// `{ "cutoff_halves": h, "terms": [ { "halves", "logpow", "cpoly" } ] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymSeriesJson {
    pub cutoff_halves: i64,
    pub terms: Vec<AsymTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymTermJson {
    pub halves: i32,
    pub logpow: u32,
    pub cpoly: Vec<String>,
}

fn terms_to_json<'a>(terms: impl Iterator<Item = (i32, u32, &'a CPoly)>, digits: usize) -> Vec<AsymTermJson> {
    terms
        .map(|(halves, logpow, c)| AsymTermJson {
            halves,
            logpow,
            cpoly: c.coeffs().iter().map(|x| format_decimal(x, digits)).collect(),
        })
        .collect()
}

fn parse_cpoly(coeffs: &[String], prec: u32) -> Result<CPoly> {
    Ok(CPoly::new(coeffs.iter().map(|s| BigReal::parse(s, prec)).collect::<Result<Vec<_>>>()?))
}

/// Product of two term maps, dropping everything above `max_halves`.
pub(crate) fn mul_terms(a: &Terms, b: &Terms, max_halves: i32) -> Terms {
    let mut out = Terms::new();
    for (&(ha, ja), ca) in a {
        for (&(hb, jb), cb) in b {
            let h = ha + hb;
            if h > max_halves {
                // b is sorted by halves
                break;
            }
            let p = ca.mul(cb);
            add_term(&mut out, (h, ja + jb), &p);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub(crate) fn add_term(terms: &mut Terms, key: (i32, u32), c: &CPoly) {
    let entry = terms.entry(key).or_insert_with(CPoly::zero);
    *entry = entry.add(c);
}

/// Sums `coeff(C)·ln(k)^j·k^(-h/2)` from the largest term down, with one
/// extra guard word of precision.
fn eval_terms<'a>(terms: impl Iterator<Item = (i32, u32, &'a CPoly)>, k: u64, c_value: &BigReal) -> Result<BigReal> {
    if k < 2 {
        return Err(Error::Precondition(format!("series evaluation needs k ≥ 2, got {k}")));
    }
    let mut terms: Vec<_> = terms.collect();
    let out_prec = terms
        .iter()
        .flat_map(|(_, _, c)| c.coeffs().iter().map(BigReal::prec))
        .chain(std::iter::once(c_value.prec()))
        .min()
        .expect("nonempty");
    let prec = out_prec + GUARD_BITS;
    // decreasing magnitude: smaller h first, larger log power first
    terms.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    let c = c_value.with_prec(prec);
    let ln_k = BigReal::ln_u64(k, prec);
    let inv_sqrt_k = BigReal::from_int(k as i64, prec).sqrt()?;
    let inv_sqrt_k = &BigReal::one(prec) / &inv_sqrt_k;
    let mut sum = BigReal::zero(prec);
    for (h, j, coeff) in terms {
        let coeff = coeff.eval(&c);
        if coeff.is_zero() {
            continue;
        }
        let term = &(&coeff * &ln_k.powi(j as i32)) * &inv_sqrt_k.powi(h);
        sum = &sum + &term;
    }
    Ok(sum.with_prec(out_prec))
}

/// Evaluates the series at index `k` with `C = c_value`.
pub fn asym_eval(s: &AsymSeries, k: u64, c_value: &BigReal) -> Result<BigReal> {
    eval_terms(s.terms.iter().map(|(&(h, j), c)| (h as i32, j, c)), k, c_value)
}

/// The series at index `k` as a polynomial in `C`.
pub fn asym_eval_poly(s: &AsymSeries, k: u64) -> Result<CPoly> {
    if k < 2 {
        return Err(Error::Precondition(format!("series evaluation needs k ≥ 2, got {k}")));
    }
    let Some(out_prec) = s.prec() else {
        return Ok(CPoly::zero());
    };
    let prec = out_prec + GUARD_BITS;
    let ln_k = BigReal::ln_u64(k, prec);
    let inv_sqrt_k = &BigReal::one(prec) / &BigReal::from_int(k as i64, prec).sqrt()?;
    let mut terms: Vec<_> = s.terms.iter().collect();
    terms.sort_by(|a, b| a.0 .0.cmp(&b.0 .0).then(b.0 .1.cmp(&a.0 .1)));
    let mut sum = CPoly::zero();
    for (&(h, j), coeff) in terms {
        let weight = &ln_k.powi(j as i32) * &inv_sqrt_k.powi(h as i32);
        let widened = CPoly::new(coeff.coeffs().iter().map(|c| c.with_prec(prec)).collect());
        sum = sum.add(&widened.scale(&weight));
    }
    Ok(CPoly::new(sum.coeffs().iter().map(|c| c.with_prec(out_prec)).collect()))
}

/// `local_map(s)` re-expanded and truncated at `cutoff_halves`.
///
/// Powers of `s` come from repeated truncated multiplication; `C`-polynomial
/// degrees add under multiplication.
pub fn substitute_into_map(local_map: &PowerSeries, s: &AsymSeries, cutoff_halves: u32) -> Result<AsymSeries> {
    if !local_map.coeffs()[0].is_zero() {
        return Err(Error::Precondition("local map must have a zero constant term".into()));
    }
    if s.is_empty() {
        return Ok(AsymSeries::new(cutoff_halves));
    }
    if s.leading_halves() != Some(1) {
        return Err(Error::Precondition("substitution needs a series led by k^(-1/2)".into()));
    }
    let max = cutoff_halves as i32;
    let base: Terms = s.to_internal().into_iter().filter(|((h, _), _)| *h <= max).collect();
    let mut power = base.clone();
    let mut out = Terms::new();
    for n in 1..=local_map.trunc_degree() {
        if n > 1 {
            power = mul_terms(&power, &base, max);
        }
        if power.is_empty() {
            break;
        }
        let a = &local_map.coeffs()[n];
        if a.is_zero() {
            continue;
        }
        for (key, c) in &power {
            add_term(&mut out, *key, &c.scale(a));
        }
    }
    out.retain(|_, c| !c.is_zero());
    AsymSeries::from_internal(cutoff_halves, out)
}

/// Reciprocal of a series led by a constant multiple of `k^(-1/2)`.
///
/// Writing `s = q·k^(-1/2)·(1 + r)`, the result is
/// `q⁻¹·k^(1/2)·Σ (−r)^n`, valid through `s.cutoff_halves − 1` half-steps
/// below the leading `k^(1/2)`.
pub fn asym_reciprocal(s: &AsymSeries) -> Result<GrowthSeries> {
    let lead = s
        .get(1, 0)
        .filter(|c| c.degree() == Some(0))
        .ok_or_else(|| Error::Precondition("reciprocal needs a nonzero constant k^(-1/2) coefficient".into()))?;
    if s.leading_halves() != Some(1) {
        return Err(Error::Precondition("reciprocal needs a series led by k^(-1/2)".into()));
    }
    let q = &lead.coeffs()[0];
    let prec = q.prec();
    let inv_q = &BigReal::one(prec) / q;
    let rel_cutoff = s.cutoff_halves as i32 - 1;
    // -r, in halves relative to the leading term
    let minus_r: Terms = s
        .terms
        .iter()
        .filter(|(&(h, _), _)| h >= 2)
        .map(|(&(h, j), c)| ((h as i32 - 1, j), c.scale(&inv_q).neg()))
        .collect();
    let mut sum = Terms::new();
    sum.insert((0, 0), CPoly::constant(BigReal::one(prec)));
    let mut power = minus_r.clone();
    while !power.is_empty() {
        for (key, c) in &power {
            add_term(&mut sum, *key, c);
        }
        power = mul_terms(&power, &minus_r, rel_cutoff);
    }
    let terms = sum
        .into_iter()
        .filter(|((h, _), c)| *h <= rel_cutoff && !c.is_zero())
        .map(|((h, j), c)| ((h - 1, j), c.scale(&inv_q)))
        .collect();
    Ok(GrowthSeries { terms, cutoff_halves: rel_cutoff - 1 })
}
