use serde::Serialize;

use crate::diffpoly::DiffPoly;
use crate::error::Result;
use crate::geometry::Geometry;
use crate::wkb::{compute_f, compute_omega_from, compute_q_from, compute_zero_mode, FTable, OmegaTable, QTable, ZeroModeTables};

/// Every symbolic table needed up to truncation order `L`.
#[derive(Clone, Debug)]
pub struct WkbTables {
    order: usize,
    pub f: FTable,
    pub omega: OmegaTable,
    pub q: QTable,
    pub zero_mode: ZeroModeTables,
}

impl WkbTables {
    pub fn new(order: usize) -> Self {
        let order = order.max(1);
        let f = compute_f(order);
        let omega = compute_omega_from(&f, order / 2);
        let q = compute_q_from(&f, order);
        WkbTables {
            order,
            omega,
            q,
            zero_mode: compute_zero_mode(order),
            f,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `F_{j,i}` for `j = 0..=i+1`.
    pub fn f_row(&self, i: usize) -> Vec<DiffPoly> {
        (0..=i + 1).map(|j| self.f.get(j, i)).collect()
    }

    /// `Omega_{j,n}` for `j = 0..=2n`.
    pub fn omega_row(&self, n: usize) -> Vec<DiffPoly> {
        (0..=2 * n).map(|j| self.omega.get(j, n)).collect()
    }
}

/// Numerical values of the subtraction constants at a fixed `z`, with the
/// uniform variable `y = f / sqrt(1 + z^2 f^2)`; at `z = 0` it equals `f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubtractionConstants {
    pub z: f64,
    /// `M_i(0, a, b)` for `i = 1..=L`.
    pub m: Vec<f64>,
    /// `Z_i^-(0, a)`.
    pub z_minus: Vec<f64>,
    /// `Z_i^+(0, b)`.
    pub z_plus: Vec<f64>,
    /// `N_i(a, b)` of the zero-mode expansion.
    pub n_zero: Vec<f64>,
    /// `D_i^-(a)`.
    pub d_minus: Vec<f64>,
    /// `D_i^+(b)`.
    pub d_plus: Vec<f64>,
    /// Accumulated quadrature error bound.
    pub error: f64,
}

impl SubtractionConstants {
    /// Index `i` is 1-based as in the expansions.
    pub fn m(&self, i: usize) -> f64 {
        self.m[i - 1]
    }

    /// `M_i + Z_i^- + Z_i^+`.
    pub fn m_neumann(&self, i: usize) -> f64 {
        self.m[i - 1] + self.z_minus[i - 1] + self.z_plus[i - 1]
    }

    /// `N_i + D_i^- + D_i^+`.
    pub fn n_neumann(&self, i: usize) -> f64 {
        self.n_zero[i - 1] + self.d_minus[i - 1] + self.d_plus[i - 1]
    }

    pub fn order(&self) -> usize {
        self.m.len()
    }
}

fn uniform_y(f: f64, z: f64) -> f64 {
    f / (1.0 + z * z * f * f).sqrt()
}

/// `G_{j,i}(z) = int F_{j,i} y^{2j+i} - [i even] Omega_{j,i/2}(a) y(a)^{2j+i}`,
/// returned for `j = 0..=i+1` with quadrature errors. At `z = 0` these are
/// the `G_{j,i}` of the determinant formulas.
pub(crate) fn g_row(geom: &Geometry, tables: &WkbTables, i: usize, z: f64) -> Result<Vec<(f64, f64)>> {
    let ya = uniform_y(geom.warp().value(geom.a()), z);
    let omega = if i.is_multiple_of(2) { tables.omega_row(i / 2) } else { Vec::new() };
    let d = geom.d_rational();
    tables
        .f_row(i)
        .iter()
        .enumerate()
        .map(|(j, fji)| {
            let power = (2 * j + i) as i32;
            let q = if z == 0.0 {
                geom.weighted_integral(fji, power, false)?
            } else {
                let c = fji.compile(&d);
                if c.is_zero() {
                    crate::geometry::Quadrature { value: 0.0, error: 0.0 }
                } else {
                    geom.integrate_jet(c.max_order(), |v| c.evaluate_slice(v) * uniform_y(v[0], z).powi(power))?
                }
            };
            let mut value = q.value;
            if let Some(om) = omega.get(j) {
                if !om.is_zero() {
                    value -= geom.eval_at(om, geom.a())? * ya.powi(power);
                }
            }
            Ok((value, q.error))
        })
        .collect()
}

fn endpoint_sum(geom: &Geometry, r: f64, z: f64, row: impl Iterator<Item = (usize, DiffPoly)>, i: usize) -> Result<f64> {
    let y = uniform_y(geom.warp().value(r), z);
    let mut total = 0.0;
    for (k, p) in row {
        if !p.is_zero() {
            total += geom.eval_at(&p, r)? * y.powi((2 * k + i) as i32);
        }
    }
    Ok(total)
}

/// Evaluates `M_i`, `Z_i^-`, `Z_i^+`, `N_i`, `D_i^-` and `D_i^+` for `i = 1..=L` at `z = 0`.
pub fn subtraction_constants(geom: &Geometry, tables: &WkbTables, order: usize) -> Result<SubtractionConstants> {
    subtraction_constants_at(geom, tables, order, 0.0)
}

/// As [`subtraction_constants`] with `M_i` and `Z_i^-+` taken at a general `z >= 0`.
/// The zero-mode constants do not depend on `z`.
pub fn subtraction_constants_at(geom: &Geometry, tables: &WkbTables, order: usize, z: f64) -> Result<SubtractionConstants> {
    if order > tables.order() {
        return Err(crate::error::Error::IndexBeyondTables {
            index: order,
            max: tables.order(),
        });
    }
    let (a, b) = (geom.a(), geom.b());
    let zm = &tables.zero_mode;
    let mut out = SubtractionConstants {
        z,
        m: Vec::with_capacity(order),
        z_minus: Vec::with_capacity(order),
        z_plus: Vec::with_capacity(order),
        n_zero: Vec::with_capacity(order),
        d_minus: Vec::with_capacity(order),
        d_plus: Vec::with_capacity(order),
        error: 0.0,
    };
    for i in 1..=order {
        let row = g_row(geom, tables, i, z)?;
        out.m.push(row.iter().map(|(v, _)| v).sum());
        out.error += row.iter().map(|(_, e)| e).sum::<f64>();
        out.z_minus
            .push(endpoint_sum(geom, a, z, (0..=i).map(|k| (k, tables.q.minus(k, i))), i)?);
        out.z_plus
            .push(endpoint_sum(geom, b, z, (0..=i).map(|k| (k, tables.q.plus(k, i))), i)?);
        let p = geom.weighted_integral(zm.p(i), 0, false)?;
        out.error += p.error;
        let mut n = p.value;
        if i % 2 == 0 {
            n -= geom.eval_at(&zm.t(i / 2), a)?;
        }
        out.n_zero.push(n);
        out.d_minus.push(geom.eval_at(&zm.d_minus(i), a)?);
        out.d_plus.push(geom.eval_at(&zm.d_plus(i), b)?);
    }
    Ok(out)
}
