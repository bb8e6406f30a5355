//! Special functions: Riemann zeta on the real line, Gamma ratios, exact
//! digamma values and compensated summation.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k}` for `k = 1..=12`.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

fn is_integer(x: f64) -> bool {
    x == x.round()
}

/// Riemann zeta for real `s != 1`.
///
/// Euler-Maclaurin summation for `s >= -1/2`, the reflection formula below.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if s == 1.0 {
        return Err(Error::GammaPole(s));
    }
    if s == 0.0 {
        return Ok(-0.5);
    }
    if s < -0.5 {
        if is_integer(s) && (s as i64) % 2 == 0 {
            return Ok(0.0);
        }
        let t = 1.0 - s;
        let sin = (0.5 * PI * s).sin();
        let (lg, sign) = libm::lgamma_r(t);
        let log_mag = s * 2f64.ln() + (s - 1.0) * PI.ln() + lg;
        return Ok(sign as f64 * sin * log_mag.exp() * riemann_zeta(t)?);
    }
    const N: usize = 24;
    let nf = N as f64;
    let mut head = KahanSum::default();
    for n in (1..N).rev() {
        head.add((n as f64).powf(-s));
    }
    head.add(0.5 * nf.powf(-s));
    head.add(nf.powf(1.0 - s) / (s - 1.0));
    // rising = s (s+1) ... (s+2k-2); factorial = (2k)!
    let mut rising = s;
    let mut factorial = 2.0;
    let mut npow = nf.powf(-s - 1.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k + 1;
        if k > 1 {
            let m = 2.0 * k as f64;
            rising *= (s + m - 3.0) * (s + m - 2.0);
            factorial *= (m - 1.0) * m;
            npow /= nf * nf;
        }
        let term = b / factorial * rising * npow;
        head.add(term);
        if term.abs() < 1e-18 * head.value().abs() {
            break;
        }
    }
    Ok(head.value())
}

/// `Gamma(x)`, with poles reported as errors.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && is_integer(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(libm::tgamma(x))
}

/// `1/Gamma(x)`, zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && is_integer(x) {
        return 0.0;
    }
    let (lg, sign) = libm::lgamma_r(x);
    sign as f64 * (-lg).exp()
}

/// `Gamma(a) / Gamma(b)` through log-Gamma differences.
///
/// A pole of the numerator is an error; a pole of the denominator gives zero.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a <= 0.0 && is_integer(a) {
        return Err(Error::GammaPole(a));
    }
    if b <= 0.0 && is_integer(b) {
        return Ok(0.0);
    }
    let diff = b - a;
    if is_integer(diff) && diff.abs() <= 64.0 {
        return Ok(1.0 / pochhammer(a, diff as i64));
    }
    let (la, sa) = libm::lgamma_r(a);
    let (lb, sb) = libm::lgamma_r(b);
    Ok((sa * sb) as f64 * (la - lb).exp())
}

/// `Gamma(x + n) / Gamma(x)` for integer `n` as a finite product.
pub fn pochhammer(x: f64, n: i64) -> f64 {
    if n >= 0 {
        (0..n).map(|k| x + k as f64).product()
    } else {
        1.0 / (1..=-n).map(|k| x - k as f64).product::<f64>()
    }
}

/// `gamma + psi(x)` at integers and half-integers away from the poles, exactly
/// as finite sums: `H_{m-1}` at `x = m` and `-2 ln 2 + 2 sum_{k=1}^{m} 1/(2k-1)`
/// at `x = m + 1/2`. Negative half-integers use `psi(x) = psi(x + 1) - 1/x`.
pub fn euler_plus_digamma(x: f64) -> Option<f64> {
    if !is_integer(2.0 * x) || (x <= 0.0 && is_integer(x)) {
        return None;
    }
    if x < 0.0 {
        return euler_plus_digamma(x + 1.0).map(|v| v - 1.0 / x);
    }
    if is_integer(x) {
        let m = x as u64;
        Some((1..m).map(|k| 1.0 / k as f64).sum())
    } else {
        let m = (x - 0.5) as u64;
        Some(-2.0 * 2f64.ln() + (1..=m).map(|k| 2.0 / (2 * k - 1) as f64).sum::<f64>())
    }
}

/// Digamma `psi(x)` for real `x` off the poles.
pub fn digamma(x: f64) -> Result<f64> {
    if x <= 0.0 && is_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if let Some(v) = euler_plus_digamma(x) {
        return Ok(v - EULER_GAMMA);
    }
    if x < 0.5 {
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut pow = inv2;
    for (k, b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
        series += b / (2.0 * (k + 1) as f64) * pow;
        pow *= inv2;
    }
    Ok(shift + y.ln() - 0.5 / y - series)
}

/// Trigamma `psi'(x)` for real `x` off the poles.
pub fn trigamma(x: f64) -> Result<f64> {
    if x <= 0.0 && is_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI * PI / (s * s) - trigamma(1.0 - x)?);
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv2 * inv;
    for b in BERNOULLI_EVEN.iter().take(8) {
        series += b * pow;
        pow *= inv2;
    }
    Ok(shift + inv + 0.5 * inv2 + series)
}

/// `zeta_R'(s)` by a five-point Richardson stencil.
pub fn riemann_zeta_derivative(s: f64) -> Result<f64> {
    let h = 2e-4 * (1.0 + s.abs());
    if (s - 1.0).abs() <= 2.0 * h {
        return Err(Error::GammaPole(1.0));
    }
    let f = |x: f64| riemann_zeta(x);
    Ok((8.0 * (f(s + h)? - f(s - h)?) - (f(s + 2.0 * h)? - f(s - 2.0 * h)?)) / (12.0 * h))
}

/// Hurwitz zeta `sum_{n >= 0} (n + q)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if s <= 1.0 || q <= 0.0 {
        return Err(Error::InvalidData(format!("hurwitz_zeta needs s > 1 and q > 0, got s = {s}, q = {q}")));
    }
    const N: usize = 16;
    let mut acc = KahanSum::default();
    for n in 0..N {
        acc.add((n as f64 + q).powf(-s));
    }
    let a = N as f64 + q;
    acc.add(a.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * a.powf(-s));
    let mut rising = s;
    let mut factorial = 2.0;
    let mut apow = a.powf(-s - 1.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        if k > 0 {
            let m = 2.0 * (k + 1) as f64;
            rising *= (s + m - 3.0) * (s + m - 2.0);
            factorial *= (m - 1.0) * m;
            apow /= a * a;
        }
        let term = b / factorial * rising * apow;
        acc.add(term);
        if term.abs() < 1e-18 * acc.value().abs() {
            break;
        }
    }
    Ok(acc.value())
}

/// Harmonic number `H_n`.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of a sequence in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<KahanSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn digamma_and_trigamma_values() {
        assert!(close(digamma(1.0).unwrap(), -EULER_GAMMA, 1e-15));
        assert!(close(digamma(-0.5).unwrap(), 2.0 - EULER_GAMMA - 2.0 * 2f64.ln(), 1e-14));
        assert!(close(digamma(0.3).unwrap(), -3.502_524_222_200_133, 1e-13));
        assert!(close(digamma(7.25).unwrap(), 1.910_453_526_883_74, 1e-13));
        assert!(close(digamma(-1.7).unwrap(), -1.485_717_499_511_06, 1e-12));
        assert!(close(trigamma(1.0).unwrap(), PI * PI / 6.0, 1e-14));
        assert!(close(trigamma(0.5).unwrap(), PI * PI / 2.0, 1e-14));
        assert!(close(trigamma(-0.5).unwrap(), PI * PI / 2.0 + 4.0, 1e-13));
        assert!(digamma(-2.0).is_err());
    }

    #[test]
    fn hurwitz_and_zeta_derivative() {
        assert!(close(hurwitz_zeta(2.0, 1.0).unwrap(), PI * PI / 6.0, 1e-15));
        assert!(close(hurwitz_zeta(2.0, 11.0).unwrap(), PI * PI / 6.0 - harmonic_sq(10), 1e-14));
        assert!(close(riemann_zeta_derivative(0.0).unwrap(), -0.5 * (2.0 * PI).ln(), 1e-11));
        assert!(close(riemann_zeta_derivative(2.0).unwrap(), -0.937_548_254_315_843_8, 1e-11));
    }

    fn harmonic_sq(n: u64) -> f64 {
        (1..=n).map(|k| 1.0 / (k * k) as f64).sum()
    }

    #[test]
    fn zeta_special_values() {
        assert!(close(riemann_zeta(2.0).unwrap(), PI * PI / 6.0, 1e-15));
        assert!(close(riemann_zeta(4.0).unwrap(), PI.powi(4) / 90.0, 1e-15));
        assert!(close(riemann_zeta(-1.0).unwrap(), -1.0 / 12.0, 1e-14));
        assert!(close(riemann_zeta(-3.0).unwrap(), 1.0 / 120.0, 1e-14));
        assert_eq!(riemann_zeta(-2.0).unwrap(), 0.0);
        assert_eq!(riemann_zeta(0.0).unwrap(), -0.5);
        assert!(close(riemann_zeta(0.5).unwrap(), -1.460_354_508_809_586_8, 1e-14));
        assert!(close(riemann_zeta(3.0).unwrap(), 1.202_056_903_159_594_3, 1e-15));
        assert!(riemann_zeta(1.0).is_err());
    }

    #[test]
    fn zeta_near_pole_and_zero() {
        let eps = 1e-4;
        let laurent = 1.0 / eps + EULER_GAMMA;
        assert!(close(riemann_zeta(1.0 + eps).unwrap(), laurent, 1e-7));
        let slope = (riemann_zeta(eps).unwrap() - riemann_zeta(-eps).unwrap()) / (2.0 * eps);
        assert!(close(slope, -0.5 * (2.0 * PI).ln(), 1e-7));
    }

    #[test]
    fn gamma_helpers() {
        assert!(close(gamma_ratio(1.0, 1.5).unwrap(), 2.0 / PI.sqrt(), 1e-15));
        assert_eq!(gamma_ratio(2.5, -1.0).unwrap(), 0.0);
        assert!(gamma_ratio(-2.0, 1.0).is_err());
        assert!(close(gamma_ratio(7.3, 2.1).unwrap(), libm::tgamma(7.3) / libm::tgamma(2.1), 1e-13));
        assert!(close(pochhammer(0.5, 3), 0.5 * 1.5 * 2.5, 1e-16));
        assert!(close(pochhammer(2.5, -2), 1.0 / (1.5 * 0.5), 1e-16));
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn digamma_exact_values() {
        assert_eq!(euler_plus_digamma(1.0), Some(0.0));
        assert!(close(euler_plus_digamma(3.0).unwrap(), 1.5, 1e-16));
        assert!(close(euler_plus_digamma(0.5).unwrap(), -2.0 * 2f64.ln(), 1e-16));
        assert!(close(euler_plus_digamma(1.5).unwrap(), 2.0 - 2.0 * 2f64.ln(), 1e-15));
        assert_eq!(euler_plus_digamma(0.3), None);
    }

    #[test]
    fn compensated() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
