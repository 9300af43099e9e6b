//! Shared reference tables and helpers for the integration tests.
#![allow(dead_code)]

use iterasym::asymseries::CPoly;
use iterasym::powerseries::PowerSeries;
use iterasym::BigReal;

/// One expected coefficient: `num/den · 2^(sqrt2_pow/2)`.
pub type Rational = (i64, i64, i32);

/// `(halves, logpow, coefficients ascending in C)`.
pub type Entry = (u32, u32, &'static [Rational]);

/// Expansion of the orbit of `x − 18x³ − 27x⁴` through `k^-4`.
pub const U_SERIES: &[Entry] = &[
    (1, 0, &[(1, 6, 0)]),
    (2, 0, &[(-1, 24, 0)]),
    (3, 1, &[(-11, 192, 0)]),
    (3, 0, &[(0, 1, 0), (1, 1, 0)]),
    (4, 1, &[(11, 384, 0)]),
    (4, 0, &[(-5, 384, 0), (-1, 2, 0)]),
    (5, 2, &[(121, 4096, 0)]),
    (5, 1, &[(-121, 3072, 0), (-33, 32, 0)]),
    (5, 0, &[(77, 3072, 0), (11, 16, 0), (9, 1, 0)]),
    (6, 2, &[(-121, 6144, 0)]),
    (6, 1, &[(77, 2048, 0), (11, 16, 0)]),
    (6, 0, &[(-139, 6144, 0), (-21, 32, 0), (-6, 1, 0)]),
    (7, 3, &[(-6655, 393216, 0)]),
    (7, 2, &[(1331, 24576, 0), (1815, 2048, 0)]),
    (7, 1, &[(-2299, 32768, 0), (-121, 64, 0), (-495, 32, 0)]),
    (7, 0, &[(2293, 73728, 0), (627, 512, 0), (33, 2, 0), (90, 1, 0)]),
    (8, 3, &[(1331, 98304, 0)]),
    (8, 2, &[(-10285, 196608, 0), (-363, 512, 0)]),
    (8, 1, &[(297, 4096, 0), (935, 512, 0), (99, 8, 0)]),
    (8, 0, &[(-9959, 294912, 0), (-81, 64, 0), (-255, 16, 0), (-72, 1, 0)]),
];

/// Expansion of the orbit of `y/(1 + y ln(1+y))` from its degree-7 Taylor
/// polynomial, through `k^-4`.
pub const POPA_SEPTIC_SERIES: &[Entry] = &[
    (1, 0, &[(1, 1, -1)]),
    (2, 0, &[(1, 4, 0)]),
    (3, 1, &[(-7, 48, -1)]),
    (3, 0, &[(0, 1, 0), (1, 1, 0)]),
    (4, 1, &[(-7, 96, 0)]),
    (4, 0, &[(-1, 32, 0), (1, 1, -1)]),
    (5, 2, &[(49, 1536, -1)]),
    (5, 1, &[(-49, 1152, -1), (-7, 16, 0)]),
    (5, 0, &[(-11, 5760, -1), (7, 24, 0), (3, 1, -1)]),
    (6, 2, &[(49, 2304, 0)]),
    (6, 1, &[(-7, 2304, 0), (-7, 12, -1)]),
    (6, 0, &[(-3013, 11520, 0), (1, 24, -1), (2, 1, 0)]),
    (7, 3, &[(-1715, 221184, -1)]),
    (7, 2, &[(343, 13824, -1), (245, 1536, 0)]),
    (7, 1, &[(-203, 18432, -1), (-49, 144, 0), (-35, 16, -1)]),
    (7, 0, &[(143, 3456, -1), (29, 384, 0), (7, 3, -1), (5, 1, 0)]),
    (8, 3, &[(-343, 55296, 0)]),
    (8, 2, &[(833, 110592, 0), (49, 192, -1)]),
    (8, 1, &[(5453, 345600, 0), (-119, 576, -1), (-7, 4, 0)]),
    (8, 0, &[(-975007, 2304000, 0), (-779, 3600, -1), (17, 24, 0), (4, 1, 1)]),
];

pub fn rational(r: Rational, prec: u32) -> BigReal {
    let (n, d, e) = r;
    let v = BigReal::from_ratio(n, d, prec);
    let root2 = BigReal::from_int(2, prec).sqrt().unwrap();
    &v * &root2.powi(e)
}

pub fn cpoly(coeffs: &[Rational], prec: u32) -> CPoly {
    CPoly::new(coeffs.iter().map(|&r| rational(r, prec)).collect())
}

/// Largest coefficient gap between two C-polynomials.
pub fn cpoly_gap(a: &CPoly, b: &CPoly, prec: u32) -> BigReal {
    a.sub(b).max_abs(prec)
}

/// Local map padded with zero coefficients to `degree`.
pub fn padded(coeffs: &[(i64, i64)], degree: usize, prec: u32) -> PowerSeries {
    let mut all = coeffs.to_vec();
    all.resize(degree + 1, (0, 1));
    PowerSeries::from_ratios(&all, prec)
}

/// `10^-digits` at `prec`.
pub fn ten_pow_neg(digits: i32, prec: u32) -> BigReal {
    BigReal::from_int(10, prec).powi(-digits)
}
