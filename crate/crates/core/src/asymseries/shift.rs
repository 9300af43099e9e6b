use crate::error::{Error, Result};
use crate::numerics::BigReal;

use super::{add_term, mul_terms, AsymSeries, CPoly, Terms};

/// Re-expands `s(k + 1)` in the basis at `k`, keeping terms through
/// `cutoff_halves`.
///
/// Uses `(k+1)^(-h/2) = k^(-h/2) Σ binom(-h/2, n) k^-n` and
/// `ln(k+1) = ln k + δ` with `δ = Σ (−1)^(m+1) k^-m / m`.
pub fn shift_reexpand(s: &AsymSeries, cutoff_halves: u32) -> Result<AsymSeries> {
    if cutoff_halves < s.cutoff_halves() {
        return Err(Error::Precondition(format!(
            "shift cutoff {cutoff_halves} below series cutoff {}",
            s.cutoff_halves()
        )));
    }
    let Some(prec) = s.prec() else {
        return Ok(AsymSeries::new(cutoff_halves));
    };
    let max = cutoff_halves as i32;
    let delta = log_increment(max, prec);
    let mut out = Terms::new();
    for term in s.terms() {
        let h = term.halves as i32;
        let room = max - h;
        // (ln k + δ)^j
        let mut log_factor = Terms::new();
        log_factor.insert((0, 0), CPoly::constant(BigReal::one(prec)));
        let mut ln_plus_delta = delta.clone();
        ln_plus_delta.insert((0, 1), CPoly::constant(BigReal::one(prec)));
        for _ in 0..term.logpow {
            log_factor = mul_terms(&log_factor, &ln_plus_delta, room);
        }
        let expanded = mul_terms(&binomial_factor(h, room, prec), &log_factor, room);
        for ((dh, j), c) in expanded {
            add_term(&mut out, (h + dh, j), &c.mul(&term.coeff));
        }
    }
    out.retain(|_, c| !c.is_zero());
    AsymSeries::from_internal(cutoff_halves, out)
}

/// `ln(1 + 1/k)` through `k^(-max/2)`.
fn log_increment(max: i32, prec: u32) -> Terms {
    (1..)
        .take_while(|m| 2 * m <= max)
        .map(|m| {
            let sign = if m % 2 == 1 { 1 } else { -1 };
            ((2 * m, 0), CPoly::constant(BigReal::from_ratio(sign, i64::from(m), prec)))
        })
        .collect()
}

/// `(1 + 1/k)^(-h/2)` through `k^(-room/2)`.
fn binomial_factor(h: i32, room: i32, prec: u32) -> Terms {
    let mut out = Terms::new();
    let mut c = BigReal::one(prec);
    let mut n = 0i64;
    while 2 * n as i32 <= room {
        out.insert((2 * n as i32, 0), CPoly::constant(c.clone()));
        // binom(-h/2, n+1) = binom(-h/2, n) · (−h − 2n) / (2(n+1))
        c = c.mul_int(-(i64::from(h) + 2 * n)).div_int(2 * (n + 1));
        n += 1;
    }
    out
}
