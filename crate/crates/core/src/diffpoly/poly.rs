use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use super::dimpoly::{rat_int, rat_to_f64, DimPoly, Rational};
use crate::error::{Error, Result};
use crate::geometry::Jet;

/// `f^fpow * prod_j (f^(j))^derivs[j-1]`.
///
/// `derivs` never has trailing zeros, so structural equality is monomial
/// equality. The derived ordering (f-power first, then derivative exponents
/// lexicographically) is the canonical term order for printing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct DiffMonomial {
    fpow: i32,
    derivs: Vec<u32>,
}

impl DiffMonomial {
    /// `pairs` lists `(derivative order >= 1, exponent)`.
    pub fn new(fpow: i32, pairs: &[(usize, u32)]) -> Self {
        let mut derivs = Vec::new();
        for &(order, exp) in pairs {
            assert!(order >= 1, "derivative order must be at least 1");
            if derivs.len() < order {
                derivs.resize(order, 0);
            }
            derivs[order - 1] += exp;
        }
        let mut m = DiffMonomial { fpow, derivs };
        m.normalize();
        m
    }

    pub fn unit() -> Self {
        Self::default()
    }

    fn normalize(&mut self) {
        while self.derivs.last() == Some(&0) {
            self.derivs.pop();
        }
    }

    pub fn fpow(&self) -> i32 {
        self.fpow
    }

    /// Exponent of `f^(order)`; zero when absent.
    pub fn deriv_exponent(&self, order: usize) -> u32 {
        order
            .checked_sub(1)
            .and_then(|i| self.derivs.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Highest derivative order present, 0 if the monomial is a pure power of f.
    pub fn max_order(&self) -> usize {
        self.derivs.len()
    }

    pub fn has_derivative(&self) -> bool {
        !self.derivs.is_empty()
    }

    fn mul(&self, other: &DiffMonomial) -> DiffMonomial {
        let n = self.derivs.len().max(other.derivs.len());
        let derivs = (0..n)
            .map(|i| self.derivs.get(i).unwrap_or(&0) + other.derivs.get(i).unwrap_or(&0))
            .collect();
        DiffMonomial {
            fpow: self.fpow + other.fpow,
            derivs,
        }
    }

    /// Leibniz rule applied to one monomial: list of (integer factor, monomial).
    fn derivative(&self) -> Vec<(i64, DiffMonomial)> {
        let mut out = Vec::new();
        if self.fpow != 0 {
            let mut m = self.clone();
            m.fpow -= 1;
            bump(&mut m.derivs, 1, 1);
            out.push((self.fpow as i64, m));
        }
        for (idx, &e) in self.derivs.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let order = idx + 1;
            let mut m = self.clone();
            m.derivs[idx] -= 1;
            bump(&mut m.derivs, order + 1, 1);
            m.normalize();
            out.push((e as i64, m));
        }
        out
    }

    pub(crate) fn eval(&self, jet: &[f64]) -> f64 {
        let mut v = jet[0].powi(self.fpow);
        for (idx, &e) in self.derivs.iter().enumerate() {
            if e > 0 {
                v *= jet[idx + 1].powi(e as i32);
            }
        }
        v
    }
}

fn bump(derivs: &mut Vec<u32>, order: usize, by: u32) {
    if derivs.len() < order {
        derivs.resize(order, 0);
    }
    derivs[order - 1] += by;
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.fpow != 0 {
            parts.push(if self.fpow == 1 {
                "f".to_string()
            } else {
                format!("f^{}", self.fpow)
            });
        }
        for (idx, &e) in self.derivs.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let base = format!("f{}", "'".repeat(idx + 1));
            parts.push(if e == 1 { base } else { format!("{base}^{e}") });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// Differential polynomial in the warping function: a finite sum of
/// `DimPoly` coefficients times `DiffMonomial`s. No zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMonomial, DimPoly>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(DimPoly::one())
    }

    pub fn constant(c: DimPoly) -> Self {
        Self::term(c, DiffMonomial::unit())
    }

    pub fn rational(c: Rational) -> Self {
        Self::constant(DimPoly::constant(c))
    }

    pub fn term(c: DimPoly, m: DiffMonomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// `f^k`.
    pub fn f_pow(k: i32) -> Self {
        Self::term(DimPoly::one(), DiffMonomial::new(k, &[]))
    }

    /// `f^(order)` to the first power.
    pub fn f_deriv(order: usize) -> Self {
        if order == 0 {
            return Self::f_pow(1);
        }
        Self::term(DimPoly::one(), DiffMonomial::new(0, &[(order, 1)]))
    }

    fn add_term(&mut self, m: DiffMonomial, c: DimPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &DimPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &DiffMonomial) -> DimPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, p)| (m.clone(), p.scale(c)))
                .collect(),
        }
    }

    pub fn scale_dim(&self, c: &DimPoly) -> Self {
        let mut out = Self::zero();
        for (m, p) in &self.terms {
            out.add_term(m.clone(), p * c);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&rat_int(n))
    }

    /// Multiplies every monomial by `f^k`.
    pub fn shift_fpow(&self, k: i32) -> Self {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, p)| {
                    let mut m = m.clone();
                    m.fpow += k;
                    (m, p.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal r-derivative, treating `f^(j)` as independent symbols linked by
    /// `d/dr f^(j) = f^(j+1)`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (k, dm) in m.derivative() {
                out.add_term(dm, c.scale(&rat_int(k)));
            }
        }
        out
    }

    /// Highest derivative order of f occurring in any term.
    pub fn max_derivative_order(&self) -> usize {
        self.terms.keys().map(DiffMonomial::max_order).max().unwrap_or(0)
    }

    /// True when every monomial carries at least one derivative of f.
    pub fn every_term_has_derivative(&self) -> bool {
        self.terms.keys().all(DiffMonomial::has_derivative)
    }

    /// Substitutes the rational dimension `d` exactly and keeps the result as
    /// a floating point evaluator for repeated use in quadrature.
    pub fn compile(&self, d: &Rational) -> CompiledPoly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let v = c.eval(d);
                (!v.is_zero()).then(|| (rat_to_f64(&v), m.clone()))
            })
            .collect();
        CompiledPoly {
            terms,
            max_order: self.max_derivative_order(),
        }
    }

    /// Evaluates at a jet `(f, f', f'', ...)` for dimension `d`.
    pub fn evaluate(&self, jet: &Jet, d: &Rational) -> Result<f64> {
        self.compile(d).evaluate(jet)
    }
}

/// Floating point image of a `DiffPoly` at a fixed dimension.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, DiffMonomial)>,
    max_order: usize,
}

impl CompiledPoly {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, jet: &Jet) -> Result<f64> {
        let values = jet.values();
        if values.len() < self.max_order + 1 {
            return Err(Error::InsufficientJetOrder {
                needed: self.max_order,
                available: values.len().saturating_sub(1),
            });
        }
        if values[0] <= 0.0 || !values[0].is_finite() {
            return Err(Error::NonpositiveWarp {
                r: jet.point(),
                value: values[0],
            });
        }
        Ok(self.eval_unchecked(values))
    }

    /// Evaluates at a raw jet slice; `f` must be positive.
    pub fn evaluate_slice(&self, values: &[f64]) -> f64 {
        debug_assert!(values.len() > self.max_order && values[0] > 0.0);
        self.eval_unchecked(values)
    }

    /// Caller guarantees the slice is long enough and `f > 0`.
    pub(crate) fn eval_unchecked(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.eval(values)).sum()
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for DiffPoly {
    /// Canonical text form: `(c(d)) * f^a * f'^b * ...` joined by ` + `,
    /// terms in ascending monomial order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m == &DiffMonomial::unit() {
                    format!("({c})")
                } else {
                    format!("({c}) * {m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffPoly[{self}]")
    }
}

impl From<DimPoly> for DiffPoly {
    fn from(c: DimPoly) -> Self {
        DiffPoly::constant(c)
    }
}

impl From<BigRational> for DiffPoly {
    fn from(c: BigRational) -> Self {
        DiffPoly::rational(c)
    }
}

/// Convenience: `U = d f'/f`.
pub fn log_derivative_times_d() -> DiffPoly {
    DiffPoly::term(DimPoly::d(), DiffMonomial::new(-1, &[(1, 1)]))
}
