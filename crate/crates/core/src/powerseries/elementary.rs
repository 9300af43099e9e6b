use crate::error::{Error, Result};
use crate::numerics::BigReal;

use super::PowerSeries;

/// Elementary outer functions for [`ps_elementary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Log1p,
    Cos,
    Sin,
    Exp,
}

/// Taylor coefficients of `kind(inner(x))` through `inner`'s truncation.
///
/// The constant term `c` of `inner` is split off and handled with scalar
/// functions: `log1p(c + v) = ln(1+c) + log1p(v/(1+c))`,
/// `cos(c + v) = cos c·cos v − sin c·sin v`, `exp(c + v) = e^c·exp v`.
pub fn ps_elementary(kind: Elementary, inner: &PowerSeries) -> Result<PowerSeries> {
    let n = inner.trunc_degree();
    let prec = inner.prec();
    let c = inner.coeffs()[0].clone();
    let v = inner.with_coeff(0, BigReal::zero(prec));
    match kind {
        Elementary::Log1p => {
            if c <= -1 {
                return Err(Error::Domain(format!("log1p at constant term {}", c.to_f64())));
            }
            let one_plus_c = c.add_int(1);
            let scaled = v.scale(&(&BigReal::one(prec) / &one_plus_c));
            let mut out = mercator(n, prec).compose(&scaled)?;
            out = out.with_coeff(0, c.ln_1p()?);
            Ok(out)
        }
        Elementary::Exp => {
            let base = exp_series(n, prec).compose(&v)?;
            Ok(base.scale(&c.exp()))
        }
        Elementary::Cos | Elementary::Sin => {
            let cv = cos_series(n, prec).compose(&v)?;
            let sv = sin_series(n, prec).compose(&v)?;
            let (cc, sc) = (c.cos(), c.sin());
            Ok(match kind {
                Elementary::Cos => cv.scale(&cc).sub(&sv.scale(&sc)),
                _ => sv.scale(&cc).add(&cv.scale(&sc)),
            })
        }
    }
}

/// `ln(1+x) = x − x²/2 + x³/3 − …`
fn mercator(n: usize, prec: u32) -> PowerSeries {
    let coeffs = (0..=n)
        .map(|k| match k {
            0 => BigReal::zero(prec),
            _ => BigReal::from_ratio(if k % 2 == 1 { 1 } else { -1 }, k as i64, prec),
        })
        .collect();
    PowerSeries::new(coeffs).expect("nonempty")
}

fn inverse_factorials(n: usize, prec: u32) -> Vec<BigReal> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = BigReal::one(prec);
    out.push(f.clone());
    for k in 1..=n {
        f = f.div_int(k as i64);
        out.push(f.clone());
    }
    out
}

fn exp_series(n: usize, prec: u32) -> PowerSeries {
    PowerSeries::new(inverse_factorials(n, prec)).expect("nonempty")
}

fn cos_series(n: usize, prec: u32) -> PowerSeries {
    let coeffs = inverse_factorials(n, prec)
        .into_iter()
        .enumerate()
        .map(|(k, f)| match k % 4 {
            0 => f,
            2 => -f,
            _ => BigReal::zero(prec),
        })
        .collect();
    PowerSeries::new(coeffs).expect("nonempty")
}

fn sin_series(n: usize, prec: u32) -> PowerSeries {
    let coeffs = inverse_factorials(n, prec)
        .into_iter()
        .enumerate()
        .map(|(k, f)| match k % 4 {
            1 => f,
            3 => -f,
            _ => BigReal::zero(prec),
        })
        .collect();
    PowerSeries::new(coeffs).expect("nonempty")
}
