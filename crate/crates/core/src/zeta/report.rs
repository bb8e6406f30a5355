use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::ode::BoundaryKind;
use crate::special::compensated_sum;

use super::constants::{subtraction_constants, WkbTables};
use super::finite::{finite_part_zprime0, FinitePartOptions};
use super::terms::{AsymptoticTerm, MassExpansion};
use super::zero_mode::{zero_mode_contribution, ZeroModeContribution};

/// Run parameters shared by the `zeta(0)` and `zeta'(0)` assemblies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[derive(Default)]
pub struct ZetaOptions {
    /// Number of subtracted asymptotic orders `L`; `None` means `L = d`.
    pub order: Option<usize>,
    #[serde(flatten)]
    pub finite: FinitePartOptions,
}


impl ZetaOptions {
    pub fn order_for(&self, geom: &Geometry) -> Result<usize> {
        let d = geom.d() as usize;
        match self.order {
            None => Ok(d),
            Some(l) if l >= d => Ok(l),
            Some(l) => Err(Error::InvalidConfig(format!(
                "truncation order L = {l} is below the base dimension d = {d}; the nu-sum would diverge"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermValue {
    pub term: String,
    pub value: f64,
}

/// `zeta(0)` split into the nonzero-mode and zero-mode sectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaAtZero {
    pub bc: BoundaryKind,
    pub value: f64,
    pub nonzero_mode_part: f64,
    pub zero_mode_part: f64,
    /// Zero eigenvalues projected out of the zero-mode tower (Neumann only).
    pub kernel_dimension: u32,
    /// `A_i(0)` for `i = -1..=L`.
    pub terms: Vec<TermValue>,
}

fn term_name(prefix: &str, i: i32) -> String {
    format!("{prefix}_{i}")
}

fn build_terms(geom: &Geometry, tables: &WkbTables, order: usize, bc: BoundaryKind) -> Result<Vec<AsymptoticTerm>> {
    (-1..=order as i32)
        .map(|i| AsymptoticTerm::new(geom, tables, i, bc, MassExpansion::MASSLESS))
        .collect()
}

fn zero_mode(geom: &Geometry, tables: &WkbTables, order: usize, bc: BoundaryKind) -> Result<ZeroModeContribution> {
    let consts = subtraction_constants(geom, tables, order)?;
    zero_mode_contribution(geom, &consts, bc)
}

pub fn zeta_at_0(geom: &Geometry, bc: BoundaryKind, opts: &ZetaOptions) -> Result<ZetaAtZero> {
    let order = opts.order_for(geom)?;
    let tables = WkbTables::new(order);
    let mut terms = Vec::new();
    for term in build_terms(geom, &tables, order, bc)? {
        let v = term.evaluate(geom, 0.0)?;
        if v.residue.abs() > 1e-12 * (1.0 + v.finite_part.abs()) {
            return Err(Error::InvalidData(format!(
                "A_{} has a pole at s = 0 (residue {:e}); the base zeta data is inconsistent",
                term.index(),
                v.residue
            )));
        }
        terms.push(TermValue {
            term: term_name("A", term.index()),
            value: v.finite_part,
        });
    }
    let nonzero = compensated_sum(terms.iter().map(|t| t.value));
    let zm = zero_mode(geom, &tables, order, bc)?;
    Ok(ZetaAtZero {
        bc,
        value: nonzero + zm.zeta0,
        nonzero_mode_part: nonzero,
        zero_mode_part: zm.zeta0,
        kernel_dimension: zm.kernel_dimension,
        terms,
    })
}

/// `lim_{s -> 0} sum_i A_i(s)` by Richardson extrapolation of symmetric
/// averages at `s = +-h` and `s = +-h/2`. Independent of the closed
/// evaluation at `s = 0` used by [`zeta_at_0`].
pub fn asymptotic_sum_limit_at_0(geom: &Geometry, bc: BoundaryKind, order: usize, h: f64) -> Result<f64> {
    let tables = WkbTables::new(order);
    let terms = build_terms(geom, &tables, order, bc)?;
    let sum_at = |s: f64| -> Result<f64> {
        let mut acc = Vec::with_capacity(terms.len());
        for t in &terms {
            acc.push(t.evaluate(geom, s)?.finite_part);
        }
        Ok(compensated_sum(acc))
    };
    let sym = |h: f64| -> Result<f64> { Ok(0.5 * (sum_at(h)? + sum_at(-h)?)) };
    let (coarse, fine) = (sym(h)?, sym(0.5 * h)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub ode_rtol: f64,
    pub quadrature_atol: f64,
    pub tail_window: f64,
}

/// `zeta'(0)`, the log-determinant and the per-term breakdown.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaReport {
    pub bc: BoundaryKind,
    pub d: u32,
    pub order: usize,
    pub nu_cutoff: f64,
    pub zeta0: f64,
    pub zeta0_prime: f64,
    /// `ln det(-Delta) = -zeta'(0)`.
    pub logdet: f64,
    /// Ordered contributions whose sum is `zeta0_prime`.
    pub breakdown: Vec<TermValue>,
    pub zero_mode: ZeroModeContribution,
    pub tail: f64,
    pub fitted_exponent: Option<f64>,
    pub levels: usize,
    pub error_estimate: f64,
    pub tolerances: Tolerances,
}

pub fn zeta_prime_at_0(geom: &Geometry, bc: BoundaryKind, opts: &ZetaOptions) -> Result<ZetaReport> {
    let order = opts.order_for(geom)?;
    let tables = WkbTables::new(order);
    let consts = subtraction_constants(geom, &tables, order)?;
    let finite = finite_part_zprime0(geom, &consts, bc, &opts.finite)?;
    let zeta_zero = zeta_at_0(geom, bc, opts)?;

    let mut breakdown = vec![TermValue {
        term: "Zprime0".into(),
        value: finite.value,
    }];
    for term in build_terms(geom, &tables, order, bc)? {
        breakdown.push(TermValue {
            term: term_name("A'", term.index()),
            value: term.derivative_at_zero(geom)?,
        });
    }
    let zm = zero_mode_contribution(geom, &consts, bc)?;
    breakdown.push(TermValue {
        term: "zero_mode".into(),
        value: zm.zeta0_prime,
    });
    let total = compensated_sum(breakdown.iter().map(|t| t.value));
    Ok(ZetaReport {
        bc,
        d: geom.d(),
        order,
        nu_cutoff: opts.finite.nu_cutoff,
        zeta0: zeta_zero.value,
        zeta0_prime: total,
        logdet: -total,
        breakdown,
        zero_mode: zm,
        tail: finite.tail,
        fitted_exponent: finite.fitted_exponent,
        levels: finite.levels,
        error_estimate: finite.error_estimate + consts.error,
        tolerances: Tolerances {
            ode_rtol: opts.finite.ode.rtol,
            quadrature_atol: geom.tolerance(),
            tail_window: opts.finite.tail_window,
        },
    })
}
