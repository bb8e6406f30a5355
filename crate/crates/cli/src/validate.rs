use std::f64::consts::PI;

use serde::Serialize;
use warpzeta::geometry::Geometry;
use warpzeta::heatkernel::heat_coefficients;
use warpzeta::ode::{BoundaryKind, OdeOptions};
use warpzeta::oracle::{fit_heat_coefficients, shoot_eigenvalues};
use warpzeta::zeta::{
    asymptotic_sum_limit_at_0, finite_part_zprime0, subtraction_constants, zero_mode_contribution,
    zero_mode_prime_by_quadrature, zeta_at_0, zeta_prime_at_0, WkbTables,
};
use warpzeta::Result;

use crate::config::{Config, Preset};

const FLAT_ZETA_PRIME: f64 = 1.644_934_072_198_802_4;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub preset: &'static str,
    pub bc: BoundaryKind,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,value,reference,tolerance,passed\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{},{:e},{:e},{:e},{}\n",
                c.name, c.value, c.reference, c.tolerance, c.passed
            ));
        }
        s
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn abs(&mut self, name: &str, value: f64, reference: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            reference,
            tolerance,
            passed: (value - reference).abs() <= tolerance,
        });
    }

    /// Relative to the reference, but never tighter than the unit scale.
    fn scaled(&mut self, name: &str, value: f64, reference: f64, rel: f64) {
        self.abs(name, value, reference, rel * reference.abs().max(1.0));
    }
}

/// `-sum_nu d(nu) ln(1 - e^{-2 nu tau})` with `tau = int dr / f`; exact for a
/// one-dimensional base at `z = 0`.
fn conformal_zprime0(geom: &Geometry) -> Result<f64> {
    let tau = geom.power_integral(-1.0)?.value;
    let mut acc = 0.0;
    for (nu, mult) in geom.base().spectrum().levels_up_to(60.0 / tau)? {
        acc -= mult as f64 * (-(-2.0 * nu * tau).exp()).ln_1p();
    }
    Ok(acc)
}

pub fn run(preset: Preset, cfg: &Config) -> Result<ValidationReport> {
    let geom = cfg.geometry()?;
    let bc = cfg.bc;
    let opts = cfg.zeta_options();
    let order = opts.order_for(&geom)?;
    let mut c = Checks(Vec::new());

    let heat = heat_coefficients(&geom, bc, 3)?;
    let a = |n: usize| heat.entries[n].total;
    let weyl = (4.0 * PI).powf(-0.5 * geom.total_dim() as f64)
        * geom.base().heat_coeffs()[0]
        * (4.0 * PI).powf(0.5 * geom.d() as f64)
        * geom.power_integral(geom.d() as f64)?.value;
    c.abs("weyl_A0", a(0), weyl, 1e-8);

    let fit = fit_heat_coefficients(&geom, bc, 75.0, (0.005, 0.04), 6)?;
    for n in 0..4 {
        c.scaled(&format!("heat_trace_fit_A{}/2", n), a(n), fit.coefficients[n], 0.01);
    }

    let z0 = zeta_at_0(&geom, bc, &opts)?;
    let total_dim = geom.total_dim() as usize;
    let heat_d = heat_coefficients(&geom, bc, total_dim)?.entries[total_dim].total;
    c.abs("zeta0_vs_heat", z0.value, heat_d - z0.kernel_dimension as f64, 1e-10);
    let limit = asymptotic_sum_limit_at_0(&geom, bc, order, 1e-3)?;
    c.abs("zeta0_richardson", z0.nonzero_mode_part, limit, 1e-6);

    let eig = shoot_eigenvalues(&geom, 1.0, bc, 10)?;
    c.abs("sturm_certified", eig.certified as u8 as f64, 1.0, 0.0);

    if geom.d() == 1 && geom.base().zero_mode_degeneracy() > 0 {
        let tables = WkbTables::new(order);
        let consts = subtraction_constants(&geom, &tables, order)?;
        let z = finite_part_zprime0(&geom, &consts, bc, &opts.finite)?;
        c.abs("conformal_Zprime0", z.value, conformal_zprime0(&geom)?, 1e-7);
    }

    if bc == BoundaryKind::Dirichlet {
        let deep = WkbTables::new(6);
        let consts = subtraction_constants(&geom, &deep, 6)?;
        let closed = zero_mode_contribution(&geom, &consts, bc)?;
        c.abs("zero_mode_zeta0", closed.zeta0, -0.5 * closed.degeneracy as f64, 0.0);
        let ode = OdeOptions {
            rtol: cfg.tolerances.ode_rtol,
            ..OdeOptions::default()
        };
        let direct = zero_mode_prime_by_quadrature(&geom, &consts, &ode)?;
        c.abs("zero_mode_quadrature", direct, closed.zeta0_prime, 1e-7);
    }

    if preset == Preset::Cylinder {
        let exact = |k: usize| ((k + 1) as f64 * PI).powi(2) + 1.0;
        let worst = eig
            .eigenvalues
            .iter()
            .map(|e| match bc {
                BoundaryKind::Dirichlet => (e.value / exact(e.index) - 1.0).abs(),
                BoundaryKind::Neumann => (e.value - (e.index as f64 * PI).powi(2) - 1.0).abs() / (1.0 + e.value),
            })
            .fold(0.0, f64::max);
        c.abs("flat_eigenvalues", worst, 0.0, 1e-8);
        if bc == BoundaryKind::Dirichlet {
            let r = zeta_prime_at_0(&geom, bc, &opts)?;
            c.abs("zeta_prime_0", r.zeta0_prime, FLAT_ZETA_PRIME, 1e-5);
        }
    }

    let passed = c.0.iter().all(|x| x.passed);
    Ok(ValidationReport {
        preset: preset.name(),
        bc,
        checks: c.0,
        passed,
    })
}
