//! The warped product `I x_f N`: interval, warping function, base data and
//! quadrature over the interval.

mod base;
mod jet;
pub mod quadrature;
mod warp;

pub use base::{make_circle_base, BaseSpectralData, ResFp, Spectrum, ZetaDataFile, ZetaPoint};
pub use jet::Jet;
pub use quadrature::{integrate, Quadrature, DEFAULT_TOLERANCE};
pub use warp::{warp_jet, Interval, WarpKind, WarpingFunction};

use crate::diffpoly::{rat_int, DiffPoly, Rational};
use crate::error::{Error, Result};

/// A warped product manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    warp: WarpingFunction,
    base: BaseSpectralData,
    tolerance: f64,
}

impl Geometry {
    pub fn new(warp: WarpingFunction, base: BaseSpectralData) -> Self {
        Geometry {
            warp,
            base,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Absolute quadrature tolerance used by every interval integral.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn interval(&self) -> Interval {
        self.warp.interval()
    }

    pub fn a(&self) -> f64 {
        self.warp.interval().a
    }

    pub fn b(&self) -> f64 {
        self.warp.interval().b
    }

    pub fn warp(&self) -> &WarpingFunction {
        &self.warp
    }

    pub fn base(&self) -> &BaseSpectralData {
        &self.base
    }

    /// Base dimension `d`.
    pub fn d(&self) -> u32 {
        self.base.d()
    }

    pub fn d_rational(&self) -> Rational {
        rat_int(self.base.d() as i64)
    }

    /// Total dimension `D = d + 1`.
    pub fn total_dim(&self) -> u32 {
        self.base.d() + 1
    }

    pub fn jet(&self, r: f64, order: usize) -> Result<Jet> {
        self.warp.jet(r, order)
    }

    /// Integrates `g(jet)` over `[a, b]`, where the jet has the given order.
    pub fn integrate_jet<G: FnMut(&[f64]) -> f64>(&self, order: usize, mut g: G) -> Result<Quadrature> {
        let mut buf = vec![0.0; order + 1];
        let mut bad: Option<(f64, f64)> = None;
        let q = integrate(
            |r| {
                self.warp.fill(r, &mut buf);
                if buf[0] <= 0.0 && bad.is_none() {
                    bad = Some((r, buf[0]));
                }
                g(&buf)
            },
            self.a(),
            self.b(),
            self.tolerance,
        )?;
        if let Some((r, value)) = bad {
            return Err(Error::NonpositiveWarp { r, value });
        }
        Ok(q)
    }

    /// `int_a^b f(t)^p dt` for real `p`.
    pub fn power_integral(&self, p: f64) -> Result<Quadrature> {
        self.integrate_jet(0, |v| v[0].powf(p))
    }

    /// `int_a^b p(t) f(t)^power [ln f(t)] dt`.
    pub fn weighted_integral(&self, p: &DiffPoly, power: i32, log_weight: bool) -> Result<Quadrature> {
        let compiled = p.compile(&self.d_rational());
        if compiled.is_zero() {
            return Ok(Quadrature {
                value: 0.0,
                error: 0.0,
            });
        }
        self.integrate_jet(compiled.max_order(), |v| {
            let w = v[0].powi(power);
            let base = compiled.eval_unchecked(v) * w;
            if log_weight {
                base * v[0].ln()
            } else {
                base
            }
        })
    }

    /// Evaluates `p` at an endpoint of the interval.
    pub fn eval_at(&self, p: &DiffPoly, r: f64) -> Result<f64> {
        let compiled = p.compile(&self.d_rational());
        let jet = self.jet(r, compiled.max_order())?;
        compiled.evaluate(&jet)
    }
}

/// `weighted_integral` of the public operation list.
pub fn weighted_integral(geom: &Geometry, p: &DiffPoly, power: i32, log_weight: bool) -> Result<Quadrature> {
    geom.weighted_integral(p, power, log_weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(kind: WarpKind) -> Geometry {
        let iv = Interval::new(0.0, 1.0).unwrap();
        Geometry::new(
            WarpingFunction::new(kind, iv).unwrap(),
            BaseSpectralData::circle(1.0, 4).unwrap(),
        )
    }

    #[test]
    fn weighted_integral_examples() {
        let one = DiffPoly::one();
        let c = geom(WarpKind::Constant { value: 3.0 });
        assert!((c.weighted_integral(&one, 2, false).unwrap().value - 9.0).abs() < 1e-13);
        let lin = geom(WarpKind::Polynomial {
            coefficients: vec![1.0, 1.0],
        });
        assert!((lin.weighted_integral(&one, 2, false).unwrap().value - 7.0 / 3.0).abs() < 1e-14);
        let q = lin.weighted_integral(&one, 0, true).unwrap();
        assert!((q.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14);
        assert!(q.error < 1e-12);
    }

    #[test]
    fn derivative_polynomial_integrates_to_boundary_difference() {
        // d/dr (f'/f) integrates to f'(b)/f(b) - f'(a)/f(a).
        let g = geom(WarpKind::Sinusoidal {
            offset: 2.0,
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        });
        let p = crate::diffpoly::log_derivative_times_d();
        let dp = p.derivative();
        let lhs = g.weighted_integral(&dp, 0, false).unwrap().value;
        let rhs = g.eval_at(&p, 1.0).unwrap() - g.eval_at(&p, 0.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
    }
}
