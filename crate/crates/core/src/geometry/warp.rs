use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{Error, Result};

/// Closed interval `[a, b]` with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidConfig(format!(
                "interval requires finite a < b, got [{a}, {b}]"
            )));
        }
        Ok(Interval { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.a && r <= self.b
    }
}

fn default_one() -> f64 {
    1.0
}

/// Parametric family of warping functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WarpKind {
    /// `f(r) = value`.
    Constant { value: f64 },
    /// `f(r) = amplitude * exp(rate * r)`.
    Exponential {
        #[serde(default = "default_one")]
        amplitude: f64,
        rate: f64,
    },
    /// `f(r) = sum_k coefficients[k] r^k`.
    Polynomial { coefficients: Vec<f64> },
    /// `f(r) = offset + amplitude * sin(frequency * r + phase)`.
    Sinusoidal {
        offset: f64,
        amplitude: f64,
        #[serde(default = "default_one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `f(r) = sum_k coefficients[k] T_k(x)` with `x` the affine image of `r` in `[-1, 1]`.
    Chebyshev { coefficients: Vec<f64> },
}

const CHEB_CACHE_ORDERS: usize = 12;
const POSITIVITY_SAMPLES: usize = 4096;

/// A validated warping function on a fixed interval.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpingFunction {
    kind: WarpKind,
    interval: Interval,
    cheb_derivs: Vec<Vec<f64>>,
}

fn chebyshev_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

impl WarpingFunction {
    /// Builds the warp and checks `f > 0` on the interval.
    pub fn new(kind: WarpKind, interval: Interval) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match &kind {
            WarpKind::Polynomial { coefficients } | WarpKind::Chebyshev { coefficients }
                if coefficients.is_empty() =>
            {
                return bad("warp needs at least one coefficient".into());
            }
            _ => {}
        }
        let params_finite = match &kind {
            WarpKind::Constant { value } => value.is_finite(),
            WarpKind::Exponential { amplitude, rate } => amplitude.is_finite() && rate.is_finite(),
            WarpKind::Polynomial { coefficients } | WarpKind::Chebyshev { coefficients } => {
                coefficients.iter().all(|c| c.is_finite())
            }
            WarpKind::Sinusoidal {
                offset,
                amplitude,
                frequency,
                phase,
            } => [offset, amplitude, frequency, phase].iter().all(|c| c.is_finite()),
        };
        if !params_finite {
            return bad("warp parameters must be finite".into());
        }
        let mut cheb_derivs = Vec::new();
        if let WarpKind::Chebyshev { coefficients } = &kind {
            cheb_derivs.push(coefficients.clone());
            for _ in 0..CHEB_CACHE_ORDERS {
                let next = chebyshev_derivative(cheb_derivs.last().unwrap());
                cheb_derivs.push(next);
            }
        }
        let w = WarpingFunction {
            kind,
            interval,
            cheb_derivs,
        };
        w.check_positive()?;
        Ok(w)
    }

    pub fn constant(value: f64, interval: Interval) -> Result<Self> {
        Self::new(WarpKind::Constant { value }, interval)
    }

    pub fn kind(&self) -> &WarpKind {
        &self.kind
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            WarpKind::Constant { .. } => true,
            WarpKind::Exponential { rate, .. } => *rate == 0.0,
            WarpKind::Polynomial { coefficients } | WarpKind::Chebyshev { coefficients } => {
                coefficients.iter().skip(1).all(|&c| c == 0.0)
            }
            WarpKind::Sinusoidal {
                amplitude,
                frequency,
                ..
            } => *amplitude == 0.0 || *frequency == 0.0,
        }
    }

    /// Sampled minimum minus a slope allowance must stay positive.
    fn check_positive(&self) -> Result<()> {
        let Interval { a, b } = self.interval;
        let h = (b - a) / POSITIVITY_SAMPLES as f64;
        let mut min = (f64::INFINITY, a);
        let mut slope: f64 = 0.0;
        let mut buf = [0.0; 2];
        for i in 0..=POSITIVITY_SAMPLES {
            let r = a + h * i as f64;
            self.fill(r, &mut buf);
            if !buf[0].is_finite() {
                return Err(Error::NonpositiveWarp { r, value: buf[0] });
            }
            if buf[0] < min.0 {
                min = (buf[0], r);
            }
            slope = slope.max(buf[1].abs());
        }
        if min.0 - 0.55 * h * slope <= 0.0 {
            return Err(Error::NonpositiveWarp {
                r: min.1,
                value: min.0,
            });
        }
        Ok(())
    }

    /// `f(r)`.
    pub fn value(&self, r: f64) -> f64 {
        let mut v = [0.0];
        self.fill(r, &mut v);
        v[0]
    }

    /// `(f(r), f'(r))`.
    pub fn value_and_slope(&self, r: f64) -> (f64, f64) {
        let mut v = [0.0; 2];
        self.fill(r, &mut v);
        (v[0], v[1])
    }

    /// Writes `f^(k)(r)` into `out[k]` for every `k < out.len()`.
    pub fn fill(&self, r: f64, out: &mut [f64]) {
        match &self.kind {
            WarpKind::Constant { value } => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = if k == 0 { *value } else { 0.0 };
                }
            }
            WarpKind::Exponential { amplitude, rate } => {
                let mut v = amplitude * (rate * r).exp();
                for o in out.iter_mut() {
                    *o = v;
                    v *= rate;
                }
            }
            WarpKind::Polynomial { coefficients } => {
                for (k, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (n, &c) in coefficients.iter().enumerate().skip(k).rev() {
                        let falling: f64 = ((n - k + 1)..=n).map(|m| m as f64).product();
                        acc = acc * r + c * falling;
                    }
                    *o = acc;
                }
            }
            WarpKind::Sinusoidal {
                offset,
                amplitude,
                frequency,
                phase,
            } => {
                let theta = frequency * r + phase;
                let (s, c) = theta.sin_cos();
                let cycle = [s, c, -s, -c];
                let mut scale = *amplitude;
                for (k, o) in out.iter_mut().enumerate() {
                    *o = scale * cycle[k % 4] + if k == 0 { *offset } else { 0.0 };
                    scale *= frequency;
                }
            }
            WarpKind::Chebyshev { .. } => {
                let Interval { a, b } = self.interval;
                let x = (2.0 * r - a - b) / (b - a);
                let stretch = 2.0 / (b - a);
                let mut extra: Option<Vec<f64>> = None;
                for (k, o) in out.iter_mut().enumerate() {
                    let coeffs: &[f64] = if k < self.cheb_derivs.len() {
                        &self.cheb_derivs[k]
                    } else {
                        let prev = extra
                            .take()
                            .unwrap_or_else(|| self.cheb_derivs.last().unwrap().clone());
                        extra = Some(chebyshev_derivative(&prev));
                        extra.as_deref().unwrap()
                    };
                    *o = clenshaw(coeffs, x) * stretch.powi(k as i32);
                }
            }
        }
    }

    /// Jet `(f, f', ..., f^(order))` at `r`.
    pub fn jet(&self, r: f64, order: usize) -> Result<Jet> {
        let mut values = vec![0.0; order + 1];
        self.fill(r, &mut values);
        Jet::new(r, values)
    }
}

/// `warp_jet` of the public operation list.
pub fn warp_jet(w: &WarpingFunction, r: f64, order: usize) -> Result<Jet> {
    w.jet(r, order)
}
