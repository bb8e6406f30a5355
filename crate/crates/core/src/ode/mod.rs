//! Radial initial value problems on the imaginary axis.
//!
//! The radial equation `u'' + (d f'/f) u' - (c + nu^2/f^2) u = 0` is solved in
//! the factored form `u = exp(int_a^r kappa) v` with
//! `kappa = sqrt(c + nu^2 / f^2)`. The exponential growth is carried
//! analytically by the phase integral, so `v` stays of moderate size and the
//! logarithms `ln u(b)` and `ln u'(b)` are assembled without overflow.

pub mod rk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{integrate, Geometry};
use rk::{integrate as rk_integrate, StepControl};

/// Boundary condition imposed at both ends of the interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    #[default]
    Dirichlet,
    Neumann,
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BoundaryKind::Dirichlet),
            "neumann" => Ok(BoundaryKind::Neumann),
            other => Err(Error::InvalidConfig(format!("unknown boundary condition `{other}`"))),
        }
    }
}

impl std::fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    /// Relative tolerance of the adaptive integrator.
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

/// Logarithmic data of the solution at `r = b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSolution {
    /// `int_a^b kappa dr`.
    pub phase: f64,
    /// `ln u(b) - phase`.
    pub log_v: f64,
    /// `ln u'(b) - phase`; `-inf` when `u'(b) = 0`.
    pub log_dv: f64,
    pub steps: usize,
}

impl LogSolution {
    pub fn log_u(&self) -> f64 {
        self.phase + self.log_v
    }

    pub fn log_u_prime(&self) -> f64 {
        self.phase + self.log_dv
    }
}

const RESCALE_THRESHOLD: f64 = 1e150;

struct Problem<'a> {
    geom: &'a Geometry,
    c: f64,
    nu2: f64,
    d: f64,
}

impl Problem<'_> {
    /// Returns `(kappa, kappa', p)` at `r`.
    fn coefficients(&self, r: f64) -> (f64, f64, f64) {
        let (f, fp) = self.geom.warp().value_and_slope(r);
        let p = self.d * fp / f;
        if self.nu2 == 0.0 {
            return (self.c.sqrt(), 0.0, p);
        }
        let k = (self.c + self.nu2 / (f * f)).sqrt();
        let kp = -self.nu2 * fp / (f * f * f * k);
        (k, kp, p)
    }

    fn phase(&self) -> Result<f64> {
        if self.nu2 == 0.0 {
            return Ok(self.c.sqrt() * self.geom.interval().length());
        }
        let tol = self.geom.tolerance() * (1.0 + (self.c + self.nu2).sqrt());
        Ok(integrate(|r| self.coefficients(r).0, self.geom.a(), self.geom.b(), tol)?.value)
    }
}

/// `v` is of order `1/kappa(a)` for Dirichlet data and of order one for
/// Neumann data; the absolute tolerance follows that scale so that a
/// vanishing slow part of `v'` does not force tiny steps.
fn step_control(geom: &Geometry, kappa_a: f64, bc: BoundaryKind, opts: &OdeOptions) -> StepControl {
    let len = geom.interval().length();
    let v_scale = match bc {
        BoundaryKind::Dirichlet => 1e-6 / (1.0 + kappa_a),
        BoundaryKind::Neumann => 1e-3,
    };
    StepControl {
        rtol: opts.rtol,
        atol: opts.rtol * v_scale,
        initial_step: (len / 64.0).min(0.1 / (1.0 + kappa_a)),
        max_steps: opts.max_steps,
    }
}

/// Solves the radial problem at imaginary spectral parameter.
///
/// For `nu > 0` the constant is `c = nu^2 z^2`; for `nu = 0` it is `c = z^2`.
/// Dirichlet data start from `u(a) = 0, u'(a) = 1`, Neumann data from
/// `u(a) = 1, u'(a) = 0`. The solution must increase on `(a, b]`.
pub fn solve_log_imaginary(geom: &Geometry, nu: f64, z: f64, bc: BoundaryKind, opts: &OdeOptions) -> Result<LogSolution> {
    if !(nu >= 0.0 && z >= 0.0 && nu.is_finite() && z.is_finite()) {
        return Err(Error::InvalidConfig(format!("need nu >= 0 and z >= 0, got nu = {nu}, z = {z}")));
    }
    let c = if nu > 0.0 { nu * nu * z * z } else { z * z };
    let prob = Problem {
        geom,
        c,
        nu2: nu * nu,
        d: geom.d() as f64,
    };
    let a = geom.a();
    let (ka, _, _) = prob.coefficients(a);
    let y0 = match bc {
        BoundaryKind::Dirichlet => [0.0, 1.0],
        BoundaryKind::Neumann => [1.0, -ka],
    };
    let mut log_scale = 0.0;
    let out = rk_integrate(
        |r, y: &[f64; 2]| {
            let (k, kp, p) = prob.coefficients(r);
            [y[1], -(2.0 * k + p) * y[1] - (kp + p * k) * y[0]]
        },
        a,
        geom.b(),
        y0,
        step_control(geom, ka, bc, opts),
        |r, y| {
            let (k, _, _) = prob.coefficients(r);
            let du = k * y[0] + y[1];
            let size = y[0].abs().max(y[1].abs());
            if du < -1e-9 * size || y[0] < 0.0 {
                return Err(Error::NonMonotone { r });
            }
            if size > RESCALE_THRESHOLD {
                y[0] /= size;
                y[1] /= size;
                log_scale += size.ln();
            }
            Ok(())
        },
    )?;
    let (kb, _, _) = prob.coefficients(geom.b());
    let [v, dv] = out.y;
    let du = kb * v + dv;
    Ok(LogSolution {
        phase: prob.phase()?,
        log_v: v.ln() + log_scale,
        log_dv: if du > 0.0 { du.ln() + log_scale } else { f64::NEG_INFINITY },
        steps: out.steps,
    })
}

/// `ln h(b)` and `d/dz ln h(b)` for the Dirichlet zero-mode solution
/// `h'' + (d f'/f) h' - z^2 h = 0`, `h(a) = 0`, `h'(a) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroModeSolution {
    pub log_h: f64,
    pub dlog_h_dz: f64,
}

pub fn solve_zero_mode_variational(geom: &Geometry, z: f64, opts: &OdeOptions) -> Result<ZeroModeSolution> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidConfig(format!("need z >= 0, got {z}")));
    }
    let d = geom.d() as f64;
    let warp = geom.warp();
    let len = geom.interval().length();
    let mut log_scale = 0.0;
    let out = rk_integrate(
        |r, y: &[f64; 4]| {
            let (f, fp) = warp.value_and_slope(r);
            let p = d * fp / f;
            let q = 2.0 * z + p;
            [
                y[1],
                -q * y[1] - p * z * y[0],
                y[3],
                -q * y[3] - p * z * y[2] - 2.0 * y[1] - p * y[0],
            ]
        },
        geom.a(),
        geom.b(),
        [0.0, 1.0, 0.0, 0.0],
        step_control(geom, z, BoundaryKind::Dirichlet, opts),
        |r, y| {
            if y[0] < 0.0 {
                return Err(Error::NonMonotone { r });
            }
            let size = y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if size > RESCALE_THRESHOLD {
                y.iter_mut().for_each(|x| *x /= size);
                log_scale += size.ln();
            }
            Ok(())
        },
    )?;
    Ok(ZeroModeSolution {
        log_h: z * len + out.y[0].ln() + log_scale,
        dlog_h_dz: len + out.y[2] / out.y[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BaseSpectralData, Interval, WarpKind, WarpingFunction};

    fn geom(kind: WarpKind, len: f64) -> Geometry {
        Geometry::new(
            WarpingFunction::new(kind, Interval::new(0.0, len).unwrap()).unwrap(),
            BaseSpectralData::circle(1.0, 4).unwrap(),
        )
    }

    fn flat(len: f64) -> Geometry {
        geom(WarpKind::Constant { value: 1.0 }, len)
    }

    fn ln_sinh(x: f64) -> f64 {
        x + (-(-2.0 * x).exp_m1()).ln() - 2f64.ln()
    }

    #[test]
    fn flat_dirichlet_and_neumann_closed_forms() {
        let g = flat(1.0);
        let opts = OdeOptions::default();
        for nu in [1.0, 7.0, 50.0, 1000.0] {
            for z in [0.0, 0.5, 2.0] {
                let k: f64 = nu * (z * z + 1.0f64).sqrt();
                let dir = solve_log_imaginary(&g, nu, z, BoundaryKind::Dirichlet, &opts).unwrap();
                let want = ln_sinh(k) - k.ln();
                assert!(((dir.log_u() - want) / want).abs() < 1e-11, "nu={nu} z={z}");
                let neu = solve_log_imaginary(&g, nu, z, BoundaryKind::Neumann, &opts).unwrap();
                let want = ln_sinh(k) + k.ln();
                assert!(((neu.log_u_prime() - want) / want).abs() < 1e-11, "nu={nu} z={z}");
            }
        }
    }

    #[test]
    fn massless_zero_mode_is_volume_ratio() {
        let g = geom(
            WarpKind::Polynomial {
                coefficients: vec![1.0, 1.0],
            },
            1.0,
        );
        let s = solve_log_imaginary(&g, 0.0, 0.0, BoundaryKind::Dirichlet, &OdeOptions::default()).unwrap();
        assert!((s.log_u() - 2f64.ln().ln()).abs() < 1e-11);
    }

    #[test]
    fn variational_derivative_matches_finite_difference() {
        let g = geom(
            WarpKind::Sinusoidal {
                offset: 2.0,
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0,
            },
            1.0,
        );
        let opts = OdeOptions::default();
        let at_zero = solve_zero_mode_variational(&g, 0.0, &opts).unwrap();
        assert!(at_zero.dlog_h_dz.abs() < 1e-12);
        for z in [0.7, 5.0, 40.0] {
            let s = solve_zero_mode_variational(&g, z, &opts).unwrap();
            let plain = solve_log_imaginary(&g, 0.0, z, BoundaryKind::Dirichlet, &opts).unwrap();
            assert!((s.log_h - plain.log_u()).abs() < 1e-10);
            let h = 1e-4 * (1.0 + z);
            let lo = solve_zero_mode_variational(&g, z - h, &opts).unwrap().log_h;
            let hi = solve_zero_mode_variational(&g, z + h, &opts).unwrap().log_h;
            let fd = (hi - lo) / (2.0 * h);
            assert!((fd - s.dlog_h_dz).abs() < 1e-6, "z={z}: {fd} vs {}", s.dlog_h_dz);
        }
    }

    #[test]
    fn rejects_negative_arguments() {
        let g = flat(1.0);
        assert!(solve_log_imaginary(&g, -1.0, 0.0, BoundaryKind::Dirichlet, &OdeOptions::default()).is_err());
    }
}
