use crate::numerics::BigReal;

/// Polynomial in the free expansion constant `C`; index `d` holds the
/// coefficient of `C^d`. Trailing exact zeros are trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    coeffs: Vec<BigReal>,
}

impl CPoly {
    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn new(mut coeffs: Vec<BigReal>) -> Self {
        while coeffs.last().is_some_and(BigReal::is_zero) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn constant(c: BigReal) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `C`.
    pub fn c_monomial(prec: u32) -> Self {
        CPoly { coeffs: vec![BigReal::zero(prec), BigReal::one(prec)] }
    }

    pub fn from_ratios(coeffs: &[(i64, i64)], prec: u32) -> Self {
        Self::new(coeffs.iter().map(|&(n, d)| BigReal::from_ratio(n, d, prec)).collect())
    }

    pub fn coeffs(&self) -> &[BigReal] {
        &self.coeffs
    }

    /// Coefficient of `C^d` (zero beyond the degree).
    pub fn coeff(&self, d: usize) -> Option<&BigReal> {
        self.coeffs.get(d)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn prec_or(&self, other: &Self) -> u32 {
        self.coeffs
            .iter()
            .chain(other.coeffs.iter())
            .map(BigReal::prec)
            .min()
            .unwrap_or(64)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigReal, &BigReal) -> BigReal) -> Self {
        let prec = self.prec_or(other);
        let zero = BigReal::zero(prec);
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| f(self.coeffs.get(i).unwrap_or(&zero), other.coeffs.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let prec = self.prec_or(other);
        let mut out = vec![BigReal::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Self::new(out)
    }

    /// Drops trailing coefficients smaller than `tol` in magnitude.
    pub fn chop(&self, tol: &BigReal) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.abs() < *tol) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn scale(&self, c: &BigReal) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        CPoly { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    /// Substitutes a value for `C` (Horner).
    pub fn eval(&self, c: &BigReal) -> BigReal {
        let mut acc = BigReal::zero(c.prec());
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * c) + a;
        }
        acc
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn max_abs(&self, prec: u32) -> BigReal {
        self.coeffs.iter().fold(BigReal::zero(prec), |m, c| if c.cmp_abs(&m).is_gt() { c.abs() } else { m })
    }
}
