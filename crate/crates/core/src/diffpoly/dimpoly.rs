use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every symbolic coefficient.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial in the base dimension `d` with exact rational coefficients.
///
/// `coeffs[k]` multiplies `d^k`. Trailing zeros are always stripped, so the
/// zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DimPoly {
    coeffs: Vec<Rational>,
}

impl DimPoly {
    pub fn zero() -> Self {
        DimPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `d`.
    pub fn d() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = DimPoly { coeffs };
        p.normalize();
        p
    }

    /// Builds from `(numerator, denominator)` pairs indexed by power of `d`.
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        Self::from_coeffs(pairs.iter().map(|&(n, q)| rat(n, q)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        DimPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Exact value at a rational `d`.
    pub fn eval(&self, d: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * d + c;
        }
        acc
    }

    pub fn eval_f64(&self, d: &Rational) -> f64 {
        rat_to_f64(&self.eval(d))
    }
}

impl Add for &DimPoly {
    type Output = DimPoly;
    fn add(self, rhs: &DimPoly) -> DimPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        DimPoly::from_coeffs(coeffs)
    }
}

impl Sub for &DimPoly {
    type Output = DimPoly;
    fn sub(self, rhs: &DimPoly) -> DimPoly {
        self + &(-rhs)
    }
}

impl Neg for &DimPoly {
    type Output = DimPoly;
    fn neg(self) -> DimPoly {
        DimPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &DimPoly {
    type Output = DimPoly;
    fn mul(self, rhs: &DimPoly) -> DimPoly {
        if self.is_zero() || rhs.is_zero() {
            return DimPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        DimPoly::from_coeffs(coeffs)
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for DimPoly {
    /// `1/8 d^2 - 1/4 d`, highest power first; `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "d".to_string(),
                _ => format!("d^{k}"),
            };
            if k == 0 {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{} {var}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DimPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DimPoly({self})")
    }
}
