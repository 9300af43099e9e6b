//! One-dimensional recurrence maps and their local models at fixed points.
//!
//! A map `f` with fixed point `μ` is studied through the centered map
//! `D(s) = f(μ + s) − μ`. Oscillatory convergence is split into two branches
//! of the double-step map: `D(D(s))` above the fixed point and `−D(D(−s))`
//! below it, both acting on a coordinate `s > 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{format_decimal, BigReal};

use super::{kindred_transform, ps_elementary, Elementary, PowerSeries};

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    /// Polynomial with ascending coefficients about 0.
    Polynomial(Vec<BigReal>),
    /// `λ x (1 − x)`.
    Logistic(BigReal),
    /// `cos x`.
    CosOnce,
    /// `y / (1 + y ln(1 + y))`.
    PopaG,
    /// `y / (1 + y^ℓ ln(1 + y))`.
    PopaGEll(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FixedPointTag {
    Zero,
    /// Root of `cos x = x`.
    Dottie,
    /// `(λ − 1)/λ` for the logistic map.
    LogisticInterior,
    Value(BigReal),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Above,
    Below,
    None,
}

/// A recurrence map together with its fixed point and branch selection.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub kind: MapKind,
    pub fixed_point: FixedPointTag,
    pub double_step: bool,
    pub orientation: Orientation,
}

impl MapSpec {
    fn single(kind: MapKind, fixed_point: FixedPointTag) -> Self {
        MapSpec { kind, fixed_point, double_step: false, orientation: Orientation::None }
    }

    /// Polynomial about 0 with fixed point 0.
    pub fn polynomial(coeffs: Vec<BigReal>) -> Self {
        Self::single(MapKind::Polynomial(coeffs), FixedPointTag::Zero)
    }

    pub fn polynomial_ints(coeffs: &[i64], prec: u32) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| BigReal::from_int(c, prec)).collect())
    }

    pub fn logistic(lambda: BigReal) -> Self {
        Self::single(MapKind::Logistic(lambda), FixedPointTag::LogisticInterior)
    }

    pub fn cos_once() -> Self {
        Self::single(MapKind::CosOnce, FixedPointTag::Dottie)
    }

    pub fn popa_g() -> Self {
        Self::single(MapKind::PopaG, FixedPointTag::Zero)
    }

    pub fn popa_g_ell(ell: u32) -> Self {
        Self::single(MapKind::PopaGEll(ell), FixedPointTag::Zero)
    }

    /// Switches to the double-step map `f∘f` on the given branch.
    pub fn double(mut self, orientation: Orientation) -> Self {
        self.double_step = true;
        self.orientation = orientation;
        self
    }

    pub fn with_fixed_point(mut self, tag: FixedPointTag) -> Self {
        self.fixed_point = tag;
        self
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.orientation != Orientation::None && !self.double_step {
            return Err(Error::Precondition("an above/below branch requires the double-step map".into()));
        }
        match &self.kind {
            MapKind::Polynomial(c) if c.is_empty() => {
                Err(Error::Precondition("polynomial map without coefficients".into()))
            }
            MapKind::Logistic(l) if l.is_zero() => Err(Error::Precondition("logistic map with λ = 0".into())),
            MapKind::PopaGEll(0) => Err(Error::Precondition("popa_ell requires ℓ ≥ 1".into())),
            _ => Ok(()),
        }
    }

    /// True when iteration happens in branch coordinates `s > 0`.
    pub fn is_branch(&self) -> bool {
        self.orientation != Orientation::None
    }

    /// Fixed point at `prec`, checked against `|f(μ) − μ| < 2^-(prec−16)`.
    pub fn resolve_fixed_point(&self, prec: u32) -> Result<BigReal> {
        self.validate()?;
        let mu = match (&self.fixed_point, &self.kind) {
            (FixedPointTag::Dottie, _) => crate::thron::dottie(prec),
            (FixedPointTag::LogisticInterior, MapKind::Logistic(l)) => {
                let l = l.with_prec(prec);
                &l.add_int(-1) / &l
            }
            (FixedPointTag::LogisticInterior, _) => {
                return Err(Error::FixedPoint("(λ−1)/λ is only defined for the logistic map".into()))
            }
            (FixedPointTag::Zero, _) => BigReal::zero(prec),
            (FixedPointTag::Value(v), _) => v.with_prec(prec),
        };
        let residue = (&self.eval_original(&mu)? - &mu).abs();
        if residue >= clamp_threshold(prec) {
            return Err(Error::FixedPoint(format!(
                "|f(μ) − μ| = {} at μ = {}",
                format_decimal(&residue, 6),
                format_decimal(&mu, 20)
            )));
        }
        Ok(mu)
    }

    /// The map itself, `x ↦ f(x)`, in original coordinates.
    pub fn eval_original(&self, x: &BigReal) -> Result<BigReal> {
        let prec = x.prec();
        match &self.kind {
            MapKind::Polynomial(c) => Ok(horner(c, x, prec)),
            MapKind::Logistic(l) => Ok(&(&l.with_prec(prec) * x) * &(&BigReal::one(prec) - x)),
            MapKind::CosOnce => Ok(x.cos()),
            MapKind::PopaG => popa(x, 1),
            MapKind::PopaGEll(ell) => popa(x, *ell),
        }
    }

    /// Builds an evaluator for the centered and branch maps at `prec`.
    pub fn evaluator(&self, prec: u32) -> Result<MapEvaluator> {
        let mu = self.resolve_fixed_point(prec)?;
        let centered = match &self.kind {
            MapKind::Polynomial(c) => Centered::Polynomial(shifted_polynomial(c, &mu, prec)?),
            MapKind::Logistic(l) => {
                let l = l.with_prec(prec);
                Centered::Polynomial(shifted_polynomial(&[BigReal::zero(prec), l.clone(), -&l], &mu, prec)?)
            }
            MapKind::CosOnce => Centered::Cos { theta: mu.clone(), sin_theta: mu.sin() },
            MapKind::PopaG | MapKind::PopaGEll(_) if !mu.is_zero() => {
                return Err(Error::Unsupported("popa maps are studied at the fixed point 0".into()))
            }
            MapKind::PopaG => Centered::Popa(1),
            MapKind::PopaGEll(ell) => Centered::Popa(*ell),
        };
        Ok(MapEvaluator { spec: self.clone(), mu, centered, prec })
    }

    /// Canonical one-line description, e.g. `logistic:3/double/above`.
    pub fn describe(&self) -> String {
        let mut out = match &self.kind {
            MapKind::Polynomial(c) => {
                format!("poly:{}", c.iter().map(compact).collect::<Vec<_>>().join(","))
            }
            MapKind::Logistic(l) => format!("logistic:{}", compact(l)),
            MapKind::CosOnce => "cos".to_string(),
            MapKind::PopaG => "popa".to_string(),
            MapKind::PopaGEll(ell) => format!("popa_ell:{ell}"),
        };
        if let FixedPointTag::Value(v) = &self.fixed_point {
            out.push_str(&format!("/fp={}", compact(v)));
        }
        if self.double_step {
            out.push_str("/double");
        }
        match self.orientation {
            Orientation::Above => out.push_str("/above"),
            Orientation::Below => out.push_str("/below"),
            Orientation::None => {}
        }
        out
    }

    /// Parses a description.
    ///
    /// Kinds: `poly:c0,c1,…`, a polynomial expression such as
    /// `x - 18x^3 - 27x^4`, `logistic:<λ>`, `cos`, `popa`, `popa_ell:<ℓ>`.
    /// Trailing modifiers follow after `/`: `double`, `above`, `below`, `fp=<value>`.
    /// `above`/`below` imply `double`.
    pub fn parse(desc: &str, prec: u32) -> Result<Self> {
        let mut segments: Vec<&str> = desc.split('/').collect();
        let mut modifiers = Vec::new();
        while segments.len() > 1 {
            let last = segments[segments.len() - 1].trim();
            if matches!(last, "double" | "above" | "below") || last.starts_with("fp=") {
                modifiers.push(last);
                segments.pop();
            } else {
                break;
            }
        }
        modifiers.reverse();
        let head_owned = segments.join("/");
        let head = head_owned.trim();
        let mut spec = if let Some(list) = head.strip_prefix("poly:") {
            let coeffs = list.split(',').map(|c| BigReal::parse(c, prec)).collect::<Result<Vec<_>>>()?;
            MapSpec::polynomial(coeffs)
        } else if let Some(l) = head.strip_prefix("logistic:") {
            MapSpec::logistic(BigReal::parse(l, prec)?)
        } else if head == "cos" {
            MapSpec::cos_once()
        } else if head == "popa" {
            MapSpec::popa_g()
        } else if let Some(l) = head.strip_prefix("popa_ell:") {
            let ell = l.trim().parse::<u32>().map_err(|_| Error::Parse(l.to_string()))?;
            MapSpec::popa_g_ell(ell)
        } else {
            MapSpec::polynomial(parse_polynomial_expr(head, prec)?)
        };
        for modifier in modifiers {
            match modifier {
                "double" => spec.double_step = true,
                "above" => spec = spec.double(Orientation::Above),
                "below" => spec = spec.double(Orientation::Below),
                m if m.starts_with("fp=") => {
                    spec.fixed_point = FixedPointTag::Value(BigReal::parse(&m[3..], prec)?);
                }
                other => return Err(Error::Parse(format!("unknown map modifier `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Local Taylor model of `map` at its fixed point, in branch coordinates.
///
/// * single step: `f(μ + s) − μ`
/// * double step, above (or no orientation): `f(f(μ + s)) − μ`
/// * double step, below: `μ − f(f(μ − s))`
///
/// The constant term is clamped to exact zero when below `2^-(prec−16)`;
/// a larger residue is reported as a fixed-point failure.
pub fn taylor_at_fixed_point(map: &MapSpec, degree: usize, prec: u32) -> Result<PowerSeries> {
    if degree < 1 {
        return Err(Error::Unsupported("local models need degree ≥ 1".into()));
    }
    let mu = map.resolve_fixed_point(prec)?;
    let s = PowerSeries::identity(degree, prec);
    let at = s.add(&PowerSeries::constant(mu.clone(), degree));
    let image = match &map.kind {
        MapKind::Polynomial(c) => horner_series(c, &at),
        MapKind::Logistic(l) => {
            let l = l.with_prec(prec);
            horner_series(&[BigReal::zero(prec), l.clone(), -&l], &at)
        }
        MapKind::CosOnce => ps_elementary(Elementary::Cos, &at)?,
        MapKind::PopaG => popa_series(&at, 1)?,
        MapKind::PopaGEll(ell) => popa_series(&at, *ell)?,
    };
    let centered = clamp_constant(image.with_coeff(0, &image.coeffs()[0] - &mu), prec)?;
    Ok(match (map.double_step, map.orientation) {
        (false, _) => centered,
        (true, Orientation::Below) => kindred_transform(&centered.compose(&centered)?),
        (true, _) => centered.compose(&centered)?,
    })
}

/// Cancellation-free evaluator of a map near its fixed point.
#[derive(Clone, Debug)]
pub struct MapEvaluator {
    spec: MapSpec,
    mu: BigReal,
    centered: Centered,
    prec: u32,
}

#[derive(Clone, Debug)]
enum Centered {
    /// Coefficients of `f(μ + s) − μ`, constant term zero.
    Polynomial(Vec<BigReal>),
    Cos { theta: BigReal, sin_theta: BigReal },
    Popa(u32),
}

impl MapEvaluator {
    pub fn spec(&self) -> &MapSpec {
        &self.spec
    }

    pub fn fixed_point(&self) -> &BigReal {
        &self.mu
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `f(μ + s) − μ`.
    pub fn centered(&self, s: &BigReal) -> Result<BigReal> {
        match &self.centered {
            Centered::Polynomial(c) => Ok(horner(c, s, self.prec)),
            Centered::Cos { theta, sin_theta } => {
                // cos(θ+s) − θ = −(2θ sin²(s/2) + sin θ sin s), using cos θ = θ
                let half = s.div_int(2).sin();
                let a = (theta * &half.square()).mul_int(2);
                Ok(-(&a + &(sin_theta * &s.sin())))
            }
            Centered::Popa(ell) => popa(s, *ell),
        }
    }

    /// The branch-coordinate map selected by the spec.
    pub fn local(&self, s: &BigReal) -> Result<BigReal> {
        match (self.spec.double_step, self.spec.orientation) {
            (false, _) => self.centered(s),
            (true, Orientation::Below) => Ok(-self.centered(&self.centered(&-s)?)?),
            (true, _) => self.centered(&self.centered(s)?),
        }
    }

    /// The map in original coordinates (`f` or `f∘f`).
    pub fn original(&self, x: &BigReal) -> Result<BigReal> {
        let once = self.spec.eval_original(x)?;
        if self.spec.double_step {
            self.spec.eval_original(&once)
        } else {
            Ok(once)
        }
    }
}

pub(crate) fn clamp_threshold(prec: u32) -> BigReal {
    BigReal::pow2(-(prec as i32 - 16), prec)
}

fn clamp_constant(s: PowerSeries, prec: u32) -> Result<PowerSeries> {
    let c0 = &s.coeffs()[0];
    if c0.is_zero() {
        return Ok(s);
    }
    if c0.abs() < clamp_threshold(prec) {
        Ok(s.with_coeff(0, BigReal::zero(prec)))
    } else {
        Err(Error::FixedPoint(format!("local map has constant term {}", format_decimal(c0, 6))))
    }
}

fn horner(coeffs: &[BigReal], x: &BigReal, prec: u32) -> BigReal {
    let mut acc = BigReal::zero(prec);
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc.with_prec(prec)
}

fn horner_series(coeffs: &[BigReal], at: &PowerSeries) -> PowerSeries {
    let n = at.trunc_degree();
    let mut acc = PowerSeries::zero(n, at.prec());
    for c in coeffs.iter().rev() {
        acc = acc.mul(at);
        acc = acc.with_coeff(0, &acc.coeffs()[0] + c);
    }
    acc
}

/// Coefficients of `p(μ + s) − μ` (exact Taylor shift) with the constant
/// term clamped.
fn shifted_polynomial(coeffs: &[BigReal], mu: &BigReal, prec: u32) -> Result<Vec<BigReal>> {
    let degree = coeffs.len().saturating_sub(1).max(1);
    let at = PowerSeries::identity(degree, prec).add(&PowerSeries::constant(mu.clone(), degree));
    let image = horner_series(coeffs, &at);
    let centered = clamp_constant(image.with_coeff(0, &image.coeffs()[0] - mu), prec)?;
    Ok(centered.coeffs().to_vec())
}

fn popa(y: &BigReal, ell: u32) -> Result<BigReal> {
    let denom = (&y.powi(ell as i32) * &y.ln_1p()?).add_int(1);
    y.checked_div(&denom)
}

fn popa_series(at: &PowerSeries, ell: u32) -> Result<PowerSeries> {
    let n = at.trunc_degree();
    let log = ps_elementary(Elementary::Log1p, at)?;
    let mut power = PowerSeries::constant(BigReal::one(at.prec()), n);
    for _ in 0..ell {
        power = power.mul(at);
    }
    let denom = power.mul(&log).add(&PowerSeries::constant(BigReal::one(at.prec()), n));
    at.div(&denom)
}

/// Integers print exactly; everything else with 40 significant digits.
fn compact(x: &BigReal) -> String {
    let f = x.as_float();
    if f.is_integer() && x.abs() < BigReal::pow2(60, x.prec()) {
        return f.to_integer().expect("finite").to_string();
    }
    let s = format_decimal(x, 40);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Parses `x - 18x^3 - 27*x^4`, `y - y^3 + 1/2 y^4`, with `−` and
/// superscript digits accepted. Any single variable letter is allowed.
fn parse_polynomial_expr(expr: &str, prec: u32) -> Result<Vec<BigReal>> {
    let bad = || Error::Parse(format!("polynomial expression `{expr}`"));
    let mut norm = String::new();
    for ch in expr.chars() {
        match ch {
            '−' => norm.push('-'),
            '²' => norm.push_str("^2"),
            '³' => norm.push_str("^3"),
            '⁴' => norm.push_str("^4"),
            '⁵' => norm.push_str("^5"),
            '⁶' => norm.push_str("^6"),
            '⁷' => norm.push_str("^7"),
            '⁸' => norm.push_str("^8"),
            '⁹' => norm.push_str("^9"),
            '·' | '*' => {}
            c if c.is_whitespace() => {}
            c => norm.push(c),
        }
    }
    if norm.is_empty() {
        return Err(bad());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in norm.chars() {
        if (ch == '+' || ch == '-') && prev.is_some_and(|p| p != '^' && p != '+' && p != '-') {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && prev.is_none() {
            negative = ch == '-';
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    terms.push((negative, current));

    let mut coeffs: Vec<BigReal> = Vec::new();
    let mut var: Option<char> = None;
    for (neg, term) in terms {
        let split = term.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(term.len());
        let (coef_str, rest) = term.split_at(split);
        let degree = if rest.is_empty() {
            0
        } else {
            let mut chars = rest.chars();
            let v = chars.next().ok_or_else(bad)?;
            if *var.get_or_insert(v) != v {
                return Err(bad());
            }
            let tail: String = chars.collect();
            if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
            }
        };
        let mut c = if coef_str.is_empty() {
            if rest.is_empty() {
                return Err(bad());
            }
            BigReal::one(prec)
        } else {
            BigReal::parse(coef_str, prec)?
        };
        if neg {
            c = -c;
        }
        if coeffs.len() <= degree {
            coeffs.resize(degree + 1, BigReal::zero(prec));
        }
        coeffs[degree] = &coeffs[degree] + &c;
    }
    Ok(coeffs)
}
