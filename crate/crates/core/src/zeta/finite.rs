use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Spectrum};
use crate::ode::{solve_log_imaginary, BoundaryKind, OdeOptions};
use crate::special::{gamma, hurwitz_zeta, KahanSum};

use super::constants::SubtractionConstants;

/// Settings for the numerical `nu`-sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FinitePartOptions {
    pub nu_cutoff: f64,
    /// Fraction of the cutoff window used for the tail fit.
    pub tail_window: f64,
    #[serde(skip)]
    pub ode: OdeOptions,
}

impl Default for FinitePartOptions {
    fn default() -> Self {
        FinitePartOptions {
            nu_cutoff: 500.0,
            tail_window: 0.25,
            ode: OdeOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinitePart {
    /// `Z'(0)` including the tail estimate.
    pub value: f64,
    /// Partial sum over the levels below the cutoff.
    pub partial_sum: f64,
    /// Estimated contribution of the levels above the cutoff.
    pub tail: f64,
    /// Decay exponent `p` of the fitted summand `C nu^-p`; absent when the
    /// summand is below the noise floor.
    pub fitted_exponent: Option<f64>,
    pub levels: usize,
    pub error_estimate: f64,
}

/// `ln u(b)` (Dirichlet) or `ln u'(b)` (Neumann) at the `z` of `consts` minus
/// its uniform large-`nu` expansion through order `nu^{-order}`.
pub fn log_u_remainder(
    geom: &Geometry,
    consts: &SubtractionConstants,
    nu: f64,
    bc: BoundaryKind,
    order: usize,
    ode: &OdeOptions,
) -> Result<f64> {
    if order > consts.order() {
        return Err(Error::IndexBeyondTables {
            index: order,
            max: consts.order(),
        });
    }
    let z = consts.z;
    let sol = solve_log_imaginary(geom, nu, z, bc, ode)?;
    let d = geom.d() as f64;
    let (fa, fb) = (geom.warp().value(geom.a()), geom.warp().value(geom.b()));
    let z2 = z * z;
    let mut acc = KahanSum::default();
    acc.add(-0.25 * ((1.0 + z2 * fa * fa) / (1.0 + z2 * fb * fb)).ln());
    acc.add(-0.5 * (d - 1.0) * (fa / fb).ln());
    match bc {
        BoundaryKind::Dirichlet => {
            acc.add(sol.log_v);
            acc.add((2.0 * nu).ln());
            acc.add(0.5 * (z2 + 1.0 / (fa * fa)).ln());
        }
        BoundaryKind::Neumann => {
            acc.add(sol.log_dv);
            acc.add((2.0 / nu).ln());
            acc.add(-0.5 * (z2 + 1.0 / (fb * fb)).ln());
        }
    }
    let mut nu_pow = 1.0;
    for i in 1..=order {
        nu_pow /= nu;
        let c = match bc {
            BoundaryKind::Dirichlet => consts.m(i),
            BoundaryKind::Neumann => consts.m_neumann(i),
        };
        acc.add(-c * nu_pow);
    }
    Ok(acc.value())
}

fn summands(
    geom: &Geometry,
    consts: &SubtractionConstants,
    bc: BoundaryKind,
    levels: &[(f64, u64)],
    ode: &OdeOptions,
) -> Result<Vec<f64>> {
    let order = geom.d() as usize;
    let one = |&(nu, _): &(f64, u64)| log_u_remainder(geom, consts, nu, bc, order, ode);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        levels.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        levels.iter().map(one).collect()
    }
}

/// Least-squares fit of `ln|r| = ln C - p ln nu`; returns `(sign * C, p)`.
fn fit_power_law(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 4 {
        return None;
    }
    let sign = points.last()?.1.signum();
    if points.iter().any(|(_, r)| r.signum() != sign || *r == 0.0) {
        return None;
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(nu, r) in points {
        let (x, y) = (nu.ln(), r.abs().ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    Some((sign * intercept.exp(), -slope))
}

/// `sum_{nu > cutoff} d(nu) C nu^-p`.
fn tail_sum(geom: &Geometry, cutoff: f64, c: f64, p: f64) -> Result<f64> {
    match geom.base().spectrum() {
        Spectrum::Circle { radius } => {
            let n = (cutoff * radius + 1e-9).floor();
            Ok(2.0 * c * radius.powf(p) * hurwitz_zeta(p, n + 1.0)?)
        }
        Spectrum::Table(_) => {
            let d = geom.d() as f64;
            let a0 = geom.base().heat_coeff(0)?;
            let density = d * a0 / gamma(0.5 * d + 1.0)?;
            Ok(c * density * cutoff.powf(d - p) / (p - d))
        }
    }
}

/// Summands below this are treated as zero outright.
const NOISE_FLOOR: f64 = 1e-13;
/// Summands below this that do not follow a decaying power law are treated
/// as integration noise: exponentially decaying remainders end up here once
/// the ODE rounding exceeds their true size.
const NOISE_CEILING: f64 = 1e-11;

/// `Z'(0)` from the per-level remainders with `L = d` subtracted orders.
pub fn finite_part_zprime0(
    geom: &Geometry,
    consts: &SubtractionConstants,
    bc: BoundaryKind,
    opts: &FinitePartOptions,
) -> Result<FinitePart> {
    if opts.nu_cutoff.is_nan() || opts.nu_cutoff <= 0.0 || !(opts.tail_window > 0.0 && opts.tail_window < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need nu_cutoff > 0 and 0 < tail_window < 1, got {} and {}",
            opts.nu_cutoff, opts.tail_window
        )));
    }
    if consts.z != 0.0 {
        return Err(Error::InvalidConfig("Z'(0) needs subtraction constants at z = 0".into()));
    }
    let levels = geom.base().spectrum().levels_up_to(opts.nu_cutoff)?;
    let values = summands(geom, consts, bc, &levels, &opts.ode)?;
    let mut partial = KahanSum::default();
    for (&(_, mult), &r) in levels.iter().zip(&values) {
        partial.add(-(mult as f64) * r);
    }
    let partial_sum = partial.value();

    let window = |frac: f64| -> Vec<(f64, f64)> {
        let lo = (1.0 - frac) * opts.nu_cutoff;
        levels
            .iter()
            .zip(&values)
            .filter(|((nu, _), _)| *nu >= lo)
            .map(|(&(nu, _), &r)| (nu, r))
            .collect()
    };
    let wide = window(opts.tail_window);
    let scale = wide.iter().fold(0.0f64, |m, (_, r)| m.max(r.abs()));
    let d = geom.d() as f64;
    let noise = (0.0, None, scale * wide.len() as f64);
    let fitted = fit_power_law(&wide);
    let (tail, exponent, tail_error) = match fitted {
        _ if scale < NOISE_FLOOR => noise,
        Some((_, p)) if p < d + 0.5 && scale < NOISE_CEILING => noise,
        None if scale < NOISE_CEILING => noise,
        None => {
            return Err(Error::TailNotDecaying {
                exponent: f64::NAN,
                required: d + 0.5,
            })
        }
        Some((_, p)) if p < d + 0.5 => {
            return Err(Error::TailNotDecaying {
                exponent: p,
                required: d + 0.5,
            })
        }
        Some((c, p)) => {
            let t = -tail_sum(geom, opts.nu_cutoff, c, p)?;
            let alt = fit_power_law(&window(0.5 * opts.tail_window))
                .filter(|&(_, q)| q > d)
                .map(|(c2, q)| tail_sum(geom, opts.nu_cutoff, c2, q).map(|v| -v))
                .transpose()?
                .unwrap_or(t);
            (t, Some(p), (t - alt).abs() + 1e-3 * t.abs())
        }
    };
    let multiplicity: f64 = levels.iter().map(|l| l.1 as f64).sum();
    Ok(FinitePart {
        value: partial_sum + tail,
        partial_sum,
        tail,
        fitted_exponent: exponent,
        levels: levels.len(),
        error_estimate: tail_error + 10.0 * opts.ode.rtol * multiplicity + consts.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BaseSpectralData, Interval, WarpKind, WarpingFunction};
    use crate::zeta::{subtraction_constants, WkbTables};

    fn geom(kind: WarpKind) -> Geometry {
        Geometry::new(
            WarpingFunction::new(kind, Interval::new(0.0, 1.0).unwrap()).unwrap(),
            BaseSpectralData::circle(1.0, 4).unwrap(),
        )
    }

    #[test]
    fn flat_summand_closed_form() {
        let g = geom(WarpKind::Constant { value: 1.0 });
        let c = subtraction_constants(&g, &WkbTables::new(1), 1).unwrap();
        let ode = OdeOptions::default();
        for nu in [1.0f64, 3.0, 10.0] {
            let want = 2.0 * (-(-2.0 * nu).exp()).ln_1p();
            for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
                let r = log_u_remainder(&g, &c, nu, bc, 1, &ode).unwrap();
                assert!((2.0 * r - want).abs() < 1e-12, "{bc} nu={nu}");
            }
        }
    }

    #[test]
    fn flat_summand_at_positive_z() {
        let g = geom(WarpKind::Constant { value: 1.0 });
        let tables = WkbTables::new(2);
        let ode = OdeOptions::default();
        for z in [0.5, 2.0] {
            let c = crate::zeta::subtraction_constants_at(&g, &tables, 2, z).unwrap();
            for nu in [1.0, 4.0] {
                let k = nu * (1.0f64 + z * z).sqrt();
                let want = (-(-2.0 * k).exp()).ln_1p();
                for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
                    let r = log_u_remainder(&g, &c, nu, bc, 2, &ode).unwrap();
                    assert!((r - want).abs() < 1e-12, "{bc} z={z} nu={nu}: {r} vs {want}");
                }
            }
        }
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let pts: Vec<(f64, f64)> = (10..40).map(|n| (n as f64, -3.0 * (n as f64).powf(-2.5))).collect();
        let (c, p) = fit_power_law(&pts).unwrap();
        assert!((c + 3.0).abs() < 1e-10 && (p - 2.5).abs() < 1e-12);
    }

    #[test]
    fn flat_cylinder_zprime() {
        let g = geom(WarpKind::Constant { value: 1.0 });
        let c = subtraction_constants(&g, &WkbTables::new(1), 1).unwrap();
        let opts = FinitePartOptions {
            nu_cutoff: 60.0,
            ..Default::default()
        };
        let z = finite_part_zprime0(&g, &c, BoundaryKind::Dirichlet, &opts).unwrap();
        assert!((z.value - 0.333_537_519_682_735_6).abs() < 1e-11, "{z:?}");
        assert_eq!(z.tail, 0.0);
    }
}
