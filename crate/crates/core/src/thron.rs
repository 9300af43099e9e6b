//! Geometric-rate limits `lim u_k / ρ^k` via convergent products.
//!
//! For a local map `f(x) = ρx + x²F(x)` with `0 < ρ < 1`, the orbit satisfies
//! `u_{j+1} = ρ u_j (1 + u_j F(u_j)/ρ)`, so
//! `lim u_k/ρ^k = u_0 Π_j (1 + u_j F(u_j)/ρ)`. The product converges
//! geometrically and its tail is bounded from `sup|F|` and the observed
//! contraction ratio.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{format_decimal, safeguarded_newton, BigReal};
use crate::powerseries::{taylor_at_fixed_point, MapEvaluator, MapSpec};

/// Dottie's number, the root of `cos x = x`.
pub fn dottie(prec: u32) -> BigReal {
    let work = prec.max(64) + 16;
    let f = |x: &BigReal| Ok((&x.cos() - x, -&x.sin().add_int(1)));
    let lo = BigReal::from_ratio(7, 10, work);
    let hi = BigReal::from_ratio(3, 4, work);
    let start = BigReal::from_ratio(739, 1000, work);
    let tol = BigReal::pow2(-(work as i32 - 4), work);
    safeguarded_newton(f, &lo, &hi, &start, &tol, 400)
        .expect("cos x − x changes sign on [0.7, 0.75]")
        .with_prec(prec)
}

/// A local map with a geometric fixed point at 0, split as `ρx + x²F(x)`.
#[derive(Clone, Debug)]
pub struct GeometricMap {
    eval: MapEvaluator,
    rho: BigReal,
    f_at_zero: BigReal,
}

impl GeometricMap {
    pub fn new(spec: &MapSpec, prec: u32) -> Result<Self> {
        let taylor = taylor_at_fixed_point(spec, 2, prec)?;
        let rho = taylor.coeff(1);
        if !(rho.is_positive() && rho < 1) {
            return Err(Error::Precondition(format!(
                "linear factor ρ = {} is not in (0, 1)",
                format_decimal(&rho, 12)
            )));
        }
        Ok(GeometricMap { eval: spec.evaluator(prec)?, rho, f_at_zero: taylor.coeff(2) })
    }

    pub fn rho(&self) -> &BigReal {
        &self.rho
    }

    pub fn prec(&self) -> u32 {
        self.eval.prec()
    }

    /// One step of the branch-coordinate map.
    pub fn step(&self, x: &BigReal) -> Result<BigReal> {
        self.eval.local(x)
    }

    /// `F(x) = (f(x) − ρx)/x²`, continued by `f''(0)/2` at 0.
    pub fn remainder(&self, x: &BigReal) -> Result<BigReal> {
        if x.is_negative() {
            return Err(Error::Domain(format!("remainder function at x = {} < 0", x.to_f64())));
        }
        if x.is_zero() {
            return Ok(self.f_at_zero.clone());
        }
        let x = x.with_prec(self.prec());
        let fx = self.step(&x)?;
        Ok(&(&fx - &(&self.rho * &x)) / &x.square())
    }
}

/// `F(x)` for the branch map described by `spec`.
pub fn remainder_function(spec: &MapSpec, x: &BigReal, prec: u32) -> Result<BigReal> {
    GeometricMap::new(spec, prec)?.remainder(x)
}

/// Empirical supremum of `|F|` on an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub sup_estimate: BigReal,
    pub argmax_location: BigReal,
    pub samples: usize,
    pub interval: (BigReal, BigReal),
}

/// Scans `|F|` on a uniform grid over `[0, x_max]` and refines the three
/// largest samples by golden-section search. An empirical check, not a proof.
pub fn bound_scan(spec: &MapSpec, x_max: &BigReal, samples: usize, prec: u32) -> Result<BoundReport> {
    scan(&GeometricMap::new(spec, prec)?, x_max, samples)
}

fn scan(map: &GeometricMap, x_max: &BigReal, samples: usize) -> Result<BoundReport> {
    if samples < 2 {
        return Err(Error::Precondition("bound scan needs at least 2 samples".into()));
    }
    if !x_max.is_positive() {
        return Err(Error::Precondition("bound scan needs a positive interval end".into()));
    }
    let prec = map.prec();
    let x_max = x_max.with_prec(prec);
    let at = |i: usize| &(&x_max * &BigReal::from_int(i as i64, prec)) / &BigReal::from_int(samples as i64, prec);
    let mut grid = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        grid.push((i, map.remainder(&at(i))?.abs()));
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[b].1.partial_cmp(&grid[a].1).expect("finite"));
    let (mut best_x, mut best) = (at(grid[order[0]].0), grid[order[0]].1.clone());
    for &idx in order.iter().take(3) {
        let lo = at(idx.saturating_sub(1));
        let hi = at((idx + 1).min(samples));
        let (x, v) = golden_max(map, &lo, &hi)?;
        if v > best {
            best = v;
            best_x = x;
        }
    }
    Ok(BoundReport {
        sup_estimate: best,
        argmax_location: best_x,
        samples: samples + 1,
        interval: (BigReal::zero(prec), x_max),
    })
}

fn golden_max(map: &GeometricMap, lo: &BigReal, hi: &BigReal) -> Result<(BigReal, BigReal)> {
    let prec = map.prec();
    let inv_phi = &(&BigReal::from_int(5, prec).sqrt()? - &BigReal::one(prec)) / &BigReal::from_int(2, prec);
    let value = |x: &BigReal| map.remainder(x).map(|v| v.abs());
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let mut c = &b - &(&inv_phi * &(&b - &a));
    let mut d = &a + &(&inv_phi * &(&b - &a));
    let (mut fc, mut fd) = (value(&c)?, value(&d)?);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = &b - &(&inv_phi * &(&b - &a));
            fc = value(&c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = &a + &(&inv_phi * &(&b - &a));
            fd = value(&d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Limit of `u_k/ρ^k` with its certification data.
#[derive(Clone, Debug, PartialEq)]
pub struct RateResult {
    pub rho: BigReal,
    pub limit: BigReal,
    pub factors_used: u64,
    /// Bound on the relative error left by the untaken tail of the product.
    pub tail_bound: BigReal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateResultJson {
    pub rho: String,
    pub limit: String,
    pub factors_used: u64,
    pub tail_bound: String,
}

impl RateResult {
    pub fn to_json(&self, digits: usize) -> RateResultJson {
        RateResultJson {
            rho: format_decimal(&self.rho, digits),
            limit: format_decimal(&self.limit, digits),
            factors_used: self.factors_used,
            tail_bound: format_decimal(&self.tail_bound, 6),
        }
    }
}

const MAX_FACTORS: u64 = 1_000_000;
const LOG_SUM_AFTER: u64 = 100_000;
const RATIO_WINDOW: usize = 8;
const SCAN_SAMPLES: usize = 1000;

/// `lim u_k/ρ^k = u_0 Π_{j≥0} (1 + u_j F(u_j)/ρ)` to `target_digits`.
///
/// `M` is 1.5 times the scanned supremum of `|F|` on `[0, u_0]`. After
/// factor `j` the remaining tail satisfies
/// `|ln tail| ≤ T = (M/ρ)·u / ((1 − r)(1 − M u/ρ))` with `u` the next
/// iterate and `r = max(ρ + M·u, last observed ratios)`; multiplication
/// stops once `e^T − 1 < 10^-(digits+2)`.
pub fn geometric_limit(spec: &MapSpec, u0: &BigReal, target_digits: u32, prec: u32) -> Result<RateResult> {
    let map = GeometricMap::new(spec, prec)?;
    if !u0.is_positive() {
        return Err(Error::Precondition("initial offset must be positive".into()));
    }
    let u0 = u0.with_prec(prec);
    let scan_map = GeometricMap::new(spec, prec.min(128))?;
    let sup = scan(&scan_map, &u0, SCAN_SAMPLES)?.sup_estimate.with_prec(prec);
    let m = &sup.mul_int(3) / &BigReal::from_int(2, prec);
    let rho = map.rho().clone();
    let tolerance = BigReal::from_int(10, prec).powi(-(target_digits as i32 + 2));
    let one = BigReal::one(prec);

    let mut product = BigReal::one(prec);
    let mut log_sum = BigReal::zero(prec);
    let mut ratios: VecDeque<BigReal> = VecDeque::with_capacity(RATIO_WINDOW);
    let mut u = u0.clone();
    let mut used = 0u64;
    loop {
        let factor = &one + &(&(&u * &map.remainder(&u)?) / &rho);
        if used < LOG_SUM_AFTER {
            product = &product * &factor;
        } else {
            log_sum = &log_sum + &factor.ln()?;
        }
        used += 1;
        let next = map.step(&u)?;
        if !next.is_positive() || next >= u {
            return Err(Error::NoConvergence(format!("orbit stopped contracting after {used} factors")));
        }
        if ratios.len() == RATIO_WINDOW {
            ratios.pop_front();
        }
        ratios.push_back(&next / &u);
        u = next;

        let mu_over_rho = &(&m * &u) / &rho;
        let mut r = &rho + &(&m * &u);
        for q in &ratios {
            if *q > r {
                r = q.clone();
            }
        }
        if r < 1 && mu_over_rho < 1 {
            let t = &mu_over_rho / &(&(&one - &r) * &(&one - &mu_over_rho));
            let tail = &t.exp() - &one;
            if tail < tolerance {
                let limit = &(&u0 * &product) * &log_sum.exp();
                return Ok(RateResult { rho, limit, factors_used: used, tail_bound: tail });
            }
        }
        if used >= MAX_FACTORS {
            return Err(Error::NoConvergence(format!("tail bound not reached within {MAX_FACTORS} factors")));
        }
    }
}
