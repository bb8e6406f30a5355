use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::dimpoly::{rat, DimPoly, Rational};
use super::poly::{DiffMonomial, DiffPoly};
use crate::error::{Error, Result};

/// Polynomial in `y = (z^2 + f^-2)^(-1/2)` with `DiffPoly` coefficients.
///
/// `coeffs[p]` multiplies `y^p`, i.e. the factor `(z^2 + f^-2)^(-p/2)`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct YPoly {
    coeffs: Vec<DiffPoly>,
}

impl YPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: DiffPoly) -> Self {
        Self::monomial(0, c)
    }

    /// `c * y^power`.
    pub fn monomial(power: usize, c: DiffPoly) -> Self {
        let mut coeffs = vec![DiffPoly::zero(); power + 1];
        coeffs[power] = c;
        let mut p = YPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_coeffs(coeffs: Vec<DiffPoly>) -> Self {
        let mut p = YPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(DiffPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `y^power` (zero beyond the stored range).
    pub fn coeff(&self, power: usize) -> DiffPoly {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[DiffPoly] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// Multiplies by `y^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![DiffPoly::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        YPoly { coeffs }
    }

    /// Total r-derivative, using `dy/dr = y^3 f'/f^3`.
    pub fn r_derivative(&self) -> Self {
        let slope = DiffPoly::term(DimPoly::one(), DiffMonomial::new(-3, &[(1, 1)]));
        let mut out = vec![DiffPoly::zero(); self.coeffs.len() + 2];
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out[p] = &out[p] + &c.derivative();
            if p > 0 {
                out[p + 2] = &out[p + 2] + &(c * &slope).scale_int(p as i64);
            }
        }
        YPoly::from_coeffs(out)
    }

    /// Numeric value for a given `y` and already-evaluated coefficients.
    pub fn evaluate_with(&self, y: f64, mut coeff_value: impl FnMut(&DiffPoly) -> f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * y + if c.is_zero() { 0.0 } else { coeff_value(c) };
        }
        acc
    }
}

impl Add for &YPoly {
    type Output = YPoly;
    fn add(self, rhs: &YPoly) -> YPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        YPoly::from_coeffs((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &YPoly {
    type Output = YPoly;
    fn sub(self, rhs: &YPoly) -> YPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        YPoly::from_coeffs((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Neg for &YPoly {
    type Output = YPoly;
    fn neg(self) -> YPoly {
        YPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &YPoly {
    type Output = YPoly;
    fn mul(self, rhs: &YPoly) -> YPoly {
        if self.is_zero() || rhs.is_zero() {
            return YPoly::zero();
        }
        let mut coeffs = vec![DiffPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        YPoly::from_coeffs(coeffs)
    }
}

/// Truncated formal series `sum_{n=0}^{order} c_n x^n` where `x` is `1/nu`
/// (or `1/z` in the zero-mode sector). Every operation truncates at `order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NuSeries {
    order: usize,
    coeffs: Vec<YPoly>,
}

impl NuSeries {
    pub fn zero(order: usize) -> Self {
        NuSeries {
            order,
            coeffs: vec![YPoly::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = YPoly::constant(DiffPoly::one());
        s
    }

    /// Coefficients beyond `order` are dropped.
    pub fn from_coeffs(order: usize, coeffs: Vec<YPoly>) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in coeffs.into_iter().enumerate().take(order + 1) {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, power: usize) -> &YPoly {
        &self.coeffs[power]
    }

    pub fn set_coeff(&mut self, power: usize, c: YPoly) {
        if power <= self.order {
            self.coeffs[power] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(YPoly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        NuSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    fn check_order(&self, other: &NuSeries) {
        assert_eq!(
            self.order, other.order,
            "series orders must agree ({} vs {})",
            self.order, other.order
        );
    }

    /// `ln(1 + self)`, requires a vanishing constant term.
    pub fn log1p(&self) -> Result<NuSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = NuSeries::zero(self.order);
        let mut power = self.clone();
        for n in 1..=self.order {
            if power.is_zero() {
                break;
            }
            let sign = if n % 2 == 1 { 1 } else { -1 };
            out = &out + &power.scale(&rat(sign, n as i64));
            power = &power * self;
        }
        Ok(out)
    }

    /// `exp(self) - 1`, requires a vanishing constant term.
    pub fn expm1(&self) -> Result<NuSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = NuSeries::zero(self.order);
        let mut power = self.clone();
        let mut factorial = Rational::one();
        for n in 1..=self.order {
            if power.is_zero() {
                break;
            }
            factorial *= Rational::from_integer((n as i64).into());
            out = &out + &power.scale(&(Rational::one() / &factorial));
            power = &power * self;
        }
        Ok(out)
    }
}

/// Cumulant expansion: `ln(1 + eps)` truncated at the order of `eps`.
pub fn series_log(eps: &NuSeries) -> Result<NuSeries> {
    eps.log1p()
}

impl Add for &NuSeries {
    type Output = NuSeries;
    fn add(self, rhs: &NuSeries) -> NuSeries {
        self.check_order(rhs);
        NuSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &NuSeries {
    type Output = NuSeries;
    fn sub(self, rhs: &NuSeries) -> NuSeries {
        self.check_order(rhs);
        NuSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &NuSeries {
    type Output = NuSeries;
    fn mul(self, rhs: &NuSeries) -> NuSeries {
        self.check_order(rhs);
        let mut out = NuSeries::zero(self.order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(self.order + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
            }
        }
        out
    }
}

impl Zero for NuSeries {
    fn zero() -> Self {
        NuSeries::zero(0)
    }
    fn is_zero(&self) -> bool {
        NuSeries::is_zero(self)
    }
}

impl Add for NuSeries {
    type Output = NuSeries;
    fn add(self, rhs: NuSeries) -> NuSeries {
        &self + &rhs
    }
}
