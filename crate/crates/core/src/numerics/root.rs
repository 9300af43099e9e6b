use crate::error::{Error, Result};

use super::BigReal;

/// Newton iteration kept inside a sign-changing bracket.
///
/// `f` returns the function value and derivative. Whenever a Newton step
/// leaves the bracket (or the derivative vanishes) a bisection step is taken
/// instead. Stops once the step is below `tol`.
pub fn safeguarded_newton<F>(
    mut f: F,
    lo: &BigReal,
    hi: &BigReal,
    start: &BigReal,
    tol: &BigReal,
    max_iter: usize,
) -> Result<BigReal>
where
    F: FnMut(&BigReal) -> Result<(BigReal, BigReal)>,
{
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let (flo, _) = f(&lo)?;
    let (fhi, _) = f(&hi)?;
    if flo.is_zero() {
        return Ok(lo);
    }
    if fhi.is_zero() {
        return Ok(hi);
    }
    if flo.is_negative() == fhi.is_negative() {
        return Err(Error::NoConvergence(format!(
            "bracket [{}, {}] has no sign change",
            lo.to_f64(),
            hi.to_f64()
        )));
    }
    let lo_negative = flo.is_negative();
    let mut x = start.clone();
    for _ in 0..max_iter {
        let (fx, dfx) = f(&x)?;
        if fx.is_zero() {
            return Ok(x);
        }
        if fx.is_negative() == lo_negative {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let newton = if dfx.is_zero() { None } else { Some(&x - &(&fx / &dfx)) };
        let next = match newton {
            Some(n) if &n > lo.min_ref(&hi) && &n < lo.max_ref(&hi) => n,
            _ => (&lo + &hi).div_int(2),
        };
        let step = (&next - &x).abs();
        x = next;
        if step <= *tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(format!("safeguarded Newton exceeded {max_iter} iterations")))
}

impl BigReal {
    fn min_ref<'a>(&'a self, other: &'a BigReal) -> &'a BigReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    fn max_ref<'a>(&'a self, other: &'a BigReal) -> &'a BigReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}
