use rug::float::Round;

use super::{BigReal, LOG2_10};

/// Decimal exponents beyond this magnitude switch to scientific notation.
const FIXED_EXPONENT_LIMIT: i32 = 40;

/// Formats `x` with `digits` significant digits, rounding to nearest.
///
/// Fixed notation is used unless the decimal exponent exceeds 40 in
/// magnitude. Zero prints as `0.` followed by `digits - 1` zeros.
pub fn format_decimal(x: &BigReal, digits: usize) -> String {
    render(x, digits, Round::Nearest)
}

/// Like [`format_decimal`] but truncates toward zero, so every printed digit
/// is a digit of the exact value.
pub fn format_truncated(x: &BigReal, digits: usize) -> String {
    render(x, digits, Round::Zero)
}

fn render(x: &BigReal, digits: usize, round: Round) -> String {
    let digits = digits.max(1);
    if x.is_zero() {
        return if digits == 1 {
            "0".to_string()
        } else {
            format!("0.{}", "0".repeat(digits - 1))
        };
    }
    let (negative, mantissa, exp) = x.to_sign_string_exp(digits, round);
    // value = 0.mantissa * 10^exp
    let exp10 = exp.expect("nonzero finite value") - 1;
    let sign = if negative { "-" } else { "" };
    if exp10.abs() > FIXED_EXPONENT_LIMIT {
        let (head, tail) = mantissa.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp10}")
        } else {
            format!("{sign}{head}.{tail}e{exp10}")
        };
    }
    if exp10 < 0 {
        let zeros = "0".repeat((-exp10 - 1) as usize);
        format!("{sign}0.{zeros}{mantissa}")
    } else {
        let int_len = exp10 as usize + 1;
        if mantissa.len() <= int_len {
            let pad = "0".repeat(int_len - mantissa.len());
            format!("{sign}{mantissa}{pad}")
        } else {
            let (int_part, frac) = mantissa.split_at(int_len);
            format!("{sign}{int_part}.{frac}")
        }
    }
}

/// Number of leading significant decimal digits on which `x` and `y` agree.
///
/// Both values are rounded to the digits representable at the smaller
/// precision and their digit strings compared from the left. Values of
/// different sign or different decimal magnitude agree on zero digits.
pub fn digits_agreement(x: &BigReal, y: &BigReal) -> u32 {
    let prec = x.prec().min(y.prec());
    let cap = ((f64::from(prec) / LOG2_10).floor() as usize).saturating_sub(2).max(1);
    match (x.is_zero(), y.is_zero()) {
        (true, true) => return cap as u32,
        (true, false) | (false, true) => return 0,
        _ => {}
    }
    if x.is_negative() != y.is_negative() {
        return 0;
    }
    let (_, sx, ex) = x.to_sign_string_exp(cap, Round::Nearest);
    let (_, sy, ey) = y.to_sign_string_exp(cap, Round::Nearest);
    if ex != ey {
        return 0;
    }
    sx.bytes().zip(sy.bytes()).take_while(|(a, b)| a == b).count() as u32
}
