use std::cell::RefCell;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{integrate, Geometry};
use crate::ode::{solve_zero_mode_variational, BoundaryKind, OdeOptions};
use crate::special::gamma;

use super::constants::SubtractionConstants;

/// Contribution of the `nu = 0` tower (zero modes of the base) to the
/// spectral zeta function.
///
/// For Neumann conditions the tower contains a genuine zero eigenvalue per
/// base zero mode. It is projected out: `zeta0` and `zeta0_prime` refer to the
/// nonzero eigenvalues of the tower, and `kernel_dimension` counts what was
/// removed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroModeContribution {
    pub bc: BoundaryKind,
    pub degeneracy: u32,
    pub zeta0: f64,
    pub zeta0_prime: f64,
    pub kernel_dimension: u32,
    /// Coefficients `N_i` (Dirichlet) or `N_i + D_i^- + D_i^+` (Neumann) of the
    /// large-`z` expansion, `i = 1..`.
    pub large_z_coefficients: Vec<f64>,
    /// `b - a`.
    pub length: f64,
}

/// `int_a^b (f(a)/f)^d`, the value `h_0(b)` of the massless Dirichlet solution.
fn h0_dirichlet(geom: &Geometry) -> Result<f64> {
    let d = geom.d() as f64;
    let fa = geom.warp().value(geom.a());
    Ok(geom.integrate_jet(0, |v| (fa / v[0]).powf(d))?.value)
}

/// `lim_{z -> 0} h'_{iz}(b) / z^2 = int_a^b f^d / f(b)^d` for the Neumann solution.
fn neumann_curvature(geom: &Geometry) -> Result<f64> {
    let d = geom.d() as f64;
    let fb = geom.warp().value(geom.b());
    Ok(geom.power_integral(d)?.value / fb.powf(d))
}

pub fn zero_mode_contribution(geom: &Geometry, consts: &SubtractionConstants, bc: BoundaryKind) -> Result<ZeroModeContribution> {
    let d0 = geom.base().zero_mode_degeneracy();
    let dd = geom.d() as f64;
    let (fa, fb) = (geom.warp().value(geom.a()), geom.warp().value(geom.b()));
    let len = geom.interval().length();
    let n = consts.order();
    let (large_z, log_arg, kernel) = match bc {
        BoundaryKind::Dirichlet => (
            consts.n_zero.clone(),
            2.0 * h0_dirichlet(geom)? * (fb / fa).powf(0.5 * dd),
            0,
        ),
        BoundaryKind::Neumann => (
            (1..=n).map(|i| consts.n_neumann(i)).collect(),
            2.0 * neumann_curvature(geom)? * (fb / fa).powf(0.5 * dd),
            d0,
        ),
    };
    let g = d0 as f64;
    Ok(ZeroModeContribution {
        bc,
        degeneracy: d0,
        zeta0: -0.5 * g,
        zeta0_prime: if d0 == 0 { 0.0 } else { -g * log_arg.ln() },
        kernel_dimension: kernel,
        large_z_coefficients: large_z,
        length: len,
    })
}

impl ZeroModeContribution {
    /// Residue of the tower's zeta function at `s = 1/2`.
    pub fn residue_half(&self) -> f64 {
        self.degeneracy as f64 * self.length / (2.0 * std::f64::consts::PI)
    }

    /// Zero-mode part of the heat coefficient `A_{n/2}` in total dimension `D`.
    ///
    /// The tower behaves like a one-dimensional operator, so its terms enter at
    /// `n = D - 1` and beyond. Indices that need `N_i` past the computed order
    /// return [`Error::IndexBeyondTables`].
    pub fn heat_part(&self, n: usize, total_dim: usize) -> Result<f64> {
        let g = self.degeneracy as f64;
        if g == 0.0 || n + 1 < total_dim {
            return Ok(0.0);
        }
        if n + 1 == total_dim {
            return Ok(g * self.length / (2.0 * std::f64::consts::PI.sqrt()));
        }
        if n == total_dim {
            return Ok(self.zeta0 + self.kernel_dimension as f64);
        }
        let i = n - total_dim;
        let coeff = |i: usize| {
            self.large_z_coefficients.get(i - 1).copied().ok_or(Error::IndexBeyondTables {
                index: i,
                max: self.large_z_coefficients.len(),
            })
        };
        if i % 2 == 1 {
            let sign = if (i / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            Ok(gamma(-(i as f64) / 2.0)? * g * sign * i as f64 * coeff(i)? / (2.0 * std::f64::consts::PI))
        } else {
            let p = i / 2;
            let fact: f64 = (1..p).map(|k| k as f64).product();
            Ok(-g * coeff(i)? / fact)
        }
    }
}

/// `zeta_0'(0)` of the Dirichlet tower from the defining `z`-integral, for
/// checking the closed form. Uses `L = d` subtractions on `[1, Z]` and the
/// remaining coefficients of `consts` for the tail beyond `Z`.
pub fn zero_mode_prime_by_quadrature(geom: &Geometry, consts: &SubtractionConstants, ode: &OdeOptions) -> Result<f64> {
    let d0 = geom.base().zero_mode_degeneracy() as f64;
    let len = geom.interval().length();
    let l = geom.d() as usize;
    if consts.order() < l + 1 {
        return Err(Error::IndexBeyondTables {
            index: l + 1,
            max: consts.order(),
        });
    }
    let n = &consts.n_zero;
    let failure = RefCell::new(None);
    let g = |z: f64| match solve_zero_mode_variational(geom, z, ode) {
        Ok(s) => s.dlog_h_dz,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let tol = 1e-11;
    let inner = integrate(g, 0.0, 1.0, tol)?;
    let z_max = (20.0f64).max(20.0 / len);
    let outer = integrate(
        |z| {
            let mut v = g(z) + 1.0 / z - len;
            for (k, nk) in n.iter().enumerate().take(l) {
                let i = (k + 1) as f64;
                v += i * nk * z.powf(-i - 1.0);
            }
            v
        },
        1.0,
        z_max,
        tol,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let tail: f64 = n.iter().enumerate().skip(l).map(|(k, nk)| -nk * z_max.powi(-(k as i32 + 1))).sum();
    let head: f64 = n.iter().take(l).sum();
    Ok(d0 * (inner.value + outer.value + tail - len - head))
}
