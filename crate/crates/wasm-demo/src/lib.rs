//! Browser bindings: three operations on a warp over `[0, 1]` with a unit-circle base.

use wasm_bindgen::prelude::*;
use warpzeta::geometry::{BaseSpectralData, Geometry, Interval, WarpKind, WarpingFunction};
use warpzeta::heatkernel::heat_coefficients as heat;
use warpzeta::ode::BoundaryKind;
use warpzeta::wkb::{compute_f, compute_omega, format_f_table, format_omega_table};
use warpzeta::zeta::{zeta_prime_at_0, ZetaOptions};

fn geometry(warp_json: &str) -> Result<Geometry, String> {
    let kind: WarpKind = serde_json::from_str(warp_json).map_err(|e| format!("warp: {e}"))?;
    let warp = WarpingFunction::new(kind, Interval::new(0.0, 1.0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let base = BaseSpectralData::circle(1.0, 16).map_err(|e| e.to_string())?;
    Ok(Geometry::new(warp, base))
}

fn bc(name: &str) -> Result<BoundaryKind, String> {
    name.parse().map_err(|e: warpzeta::Error| e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string_pretty(v).map_err(|e| e.to_string())
}

pub fn tables_text(imax: usize) -> Result<String, String> {
    if imax == 0 || imax > 4 {
        return Err(format!("imax must lie in 1..=4, got {imax}"));
    }
    Ok(format!(
        "{}\n{}",
        format_f_table(&compute_f(imax)),
        format_omega_table(&compute_omega(imax))
    ))
}

pub fn heat_json(warp_json: &str, bc_name: &str, n_max: usize) -> Result<String, String> {
    if n_max > 8 {
        return Err(format!("n_max must be at most 8, got {n_max}"));
    }
    let h = heat(&geometry(warp_json)?, bc(bc_name)?, n_max).map_err(|e| e.to_string())?;
    to_json(&h)
}

pub fn logdet_json(warp_json: &str, bc_name: &str, nu_cutoff: f64) -> Result<String, String> {
    if !(1.0..=2000.0).contains(&nu_cutoff) {
        return Err(format!("nu_cutoff must lie in [1, 2000], got {nu_cutoff}"));
    }
    let mut opts = ZetaOptions::default();
    opts.finite.nu_cutoff = nu_cutoff;
    let r = zeta_prime_at_0(&geometry(warp_json)?, bc(bc_name)?, &opts).map_err(|e| e.to_string())?;
    to_json(&r)
}

/// Symbolic `F_{k,i}` and `Omega_{k,i}` tables as text.
#[wasm_bindgen]
pub fn wkb_tables(imax: usize) -> Result<String, JsValue> {
    tables_text(imax).map_err(|e| JsValue::from_str(&e))
}

/// Heat coefficients `A_{n/2}`, `n <= n_max`, as JSON.
#[wasm_bindgen]
pub fn heat_coefficients(warp_json: &str, bc: &str, n_max: usize) -> Result<String, JsValue> {
    heat_json(warp_json, bc, n_max).map_err(|e| JsValue::from_str(&e))
}

/// `zeta'(0)` report with its breakdown, as JSON.
#[wasm_bindgen]
pub fn log_determinant(warp_json: &str, bc: &str, nu_cutoff: f64) -> Result<String, JsValue> {
    logdet_json(warp_json, bc, nu_cutoff).map_err(|e| JsValue::from_str(&e))
}
