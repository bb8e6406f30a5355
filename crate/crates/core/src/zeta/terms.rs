//! Closed forms of the asymptotic terms `A_i(s)` and their Laurent data.
//!
//! Every term is a finite sum of pieces
//! `c * Gamma(s + p) / Gamma(s) * zeta_N(s + alpha) * W(s)`, where `W(s)` is a
//! combination of interval integrals `int P f^{2s + q}` and endpoint values
//! `P(r) f(r)^{2s + q}`. Values, residues and `s`-derivatives all follow from
//! the Laurent expansion of that product.

use std::f64::consts::PI;

use crate::diffpoly::CompiledPoly;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, ResFp};
use crate::ode::BoundaryKind;
use crate::special::{digamma, euler_plus_digamma, gamma, harmonic, rgamma, trigamma, EULER_GAMMA};

use super::constants::WkbTables;

#[derive(Clone, Debug)]
enum WeightPart {
    Interior { poly: CompiledPoly, power: i32 },
    Endpoint { value: f64, f: f64, power: i32 },
}

#[derive(Clone, Debug)]
struct Piece {
    coeff: f64,
    p: f64,
    alpha: f64,
    weight: Vec<WeightPart>,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `[eps^-1, eps^0, eps^1]` coefficients of `Gamma(x + eps)`.
fn gamma_laurent(x: f64) -> Result<[f64; 3]> {
    if is_nonpositive_integer(x) {
        let m = (-x) as u64;
        let c = if m.is_multiple_of(2) { 1.0 } else { -1.0 } / (1..=m).map(|k| k as f64).product::<f64>();
        let psi = harmonic(m) - EULER_GAMMA;
        let h2: f64 = (1..=m).map(|k| 1.0 / (k * k) as f64).sum();
        return Ok([c, c * psi, 0.5 * c * (psi * psi + h2 + PI * PI / 6.0)]);
    }
    let g = gamma(x)?;
    Ok([0.0, g, g * digamma(x)?])
}

/// `[eps^0, eps^1, eps^2]` coefficients of `1 / Gamma(x + eps)`.
fn rgamma_taylor(x: f64) -> Result<[f64; 3]> {
    if is_nonpositive_integer(x) {
        let [c, c0, _] = gamma_laurent(x)?;
        let psi = c0 / c;
        return Ok([0.0, 1.0 / c, -psi / c]);
    }
    let r = rgamma(x);
    let psi = digamma(x)?;
    Ok([r, -psi * r, 0.5 * (psi * psi - trigamma(x)?) * r])
}

/// `[eps^-1, eps^0, eps^1]` of `Gamma(s0 + p + eps) / Gamma(s0 + eps)`.
fn ratio_laurent(s0: f64, p: f64) -> Result<[f64; 3]> {
    if p == 0.0 {
        return Ok([0.0, 1.0, 0.0]);
    }
    let a = gamma_laurent(s0 + p)?;
    let r = rgamma_taylor(s0)?;
    Ok([a[0] * r[0], a[0] * r[1] + a[1] * r[0], a[0] * r[2] + a[1] * r[1] + a[2] * r[0]])
}

/// `gamma + psi(p)`, exact at integers and half-integers.
fn euler_psi(p: f64) -> Result<f64> {
    match euler_plus_digamma(p) {
        Some(v) => Ok(v),
        None => Ok(EULER_GAMMA + digamma(p)?),
    }
}

impl Piece {
    /// `(W(s), W'(s))`.
    fn weight(&self, geom: &Geometry, s: f64, with_derivative: bool) -> Result<(f64, f64)> {
        let mut w0 = 0.0;
        let mut w1 = 0.0;
        for part in &self.weight {
            match part {
                WeightPart::Interior { poly, power } => {
                    let expo = 2.0 * s + *power as f64;
                    w0 += geom.integrate_jet(poly.max_order(), |v| poly_eval(poly, v) * v[0].powf(expo))?.value;
                    if with_derivative {
                        w1 += 2.0
                            * geom
                                .integrate_jet(poly.max_order(), |v| poly_eval(poly, v) * v[0].powf(expo) * v[0].ln())?
                                .value;
                    }
                }
                WeightPart::Endpoint { value, f, power } => {
                    let term = value * f.powf(2.0 * s + *power as f64);
                    w0 += term;
                    w1 += 2.0 * term * f.ln();
                }
            }
        }
        Ok((w0, w1))
    }

    fn laurent(&self, geom: &Geometry, s0: f64) -> Result<ResFp> {
        let g = ratio_laurent(s0, self.p)?;
        let x = s0 + self.alpha;
        let z = geom.base().zeta_at(x)?;
        if g[0] != 0.0 && z.residue != 0.0 {
            return Err(Error::GammaPole(s0));
        }
        let h_m1 = g[0] * z.finite_part + g[1] * z.residue;
        let mut h0 = g[1] * z.finite_part;
        if g[0] != 0.0 {
            h0 += g[0] * geom.base().zeta_derivative(x)?;
        }
        if z.residue != 0.0 {
            h0 += g[2] * z.residue;
        }
        if h_m1 == 0.0 && h0 == 0.0 {
            return Ok(ResFp::regular(0.0));
        }
        let (w0, w1) = self.weight(geom, s0, h_m1 != 0.0)?;
        Ok(ResFp {
            residue: self.coeff * h_m1 * w0,
            finite_part: self.coeff * (h0 * w0 + h_m1 * w1),
        })
    }

    fn derivative_at_zero(&self, geom: &Geometry) -> Result<f64> {
        let z = geom.base().zeta_at(self.alpha)?;
        if self.p == 0.0 {
            if z.residue != 0.0 {
                return Err(Error::GammaPole(self.alpha));
            }
            let (w0, w1) = self.weight(geom, 0.0, true)?;
            let dz = geom.base().zeta_derivative(self.alpha)?;
            return Ok(self.coeff * (dz * w0 + z.finite_part * w1));
        }
        if is_nonpositive_integer(self.p) {
            return Err(Error::GammaPole(self.p));
        }
        let gp = gamma(self.p)?;
        let (w0, w1) = self.weight(geom, 0.0, z.residue != 0.0)?;
        let bracket = (z.finite_part + z.residue * euler_psi(self.p)?) * w0 + z.residue * w1;
        Ok(self.coeff * gp * bracket)
    }
}

fn poly_eval(poly: &CompiledPoly, v: &[f64]) -> f64 {
    poly.evaluate_slice(v)
}

/// Symbolic description of `A_i(s)` (or its Neumann counterpart) on a geometry.
#[derive(Clone, Debug)]
pub struct AsymptoticTerm {
    index: i32,
    bc: BoundaryKind,
    pieces: Vec<Piece>,
}

/// Parameters of the optional mass expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassExpansion {
    pub k_max: usize,
    pub mass: f64,
}

impl MassExpansion {
    pub const MASSLESS: MassExpansion = MassExpansion { k_max: 0, mass: 0.0 };

    fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let kmax = if self.mass == 0.0 { 0 } else { self.k_max };
        (0..=kmax).map(move |k| {
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (k, sign * self.mass.powi(2 * k as i32) / fact)
        })
    }
}

impl Default for MassExpansion {
    fn default() -> Self {
        Self::MASSLESS
    }
}

impl AsymptoticTerm {
    /// Builds `A_i` for `i >= -1`; tables must reach order `i`.
    pub fn new(geom: &Geometry, tables: &WkbTables, index: i32, bc: BoundaryKind, mass: MassExpansion) -> Result<Self> {
        if index < -1 {
            return Err(Error::InvalidConfig(format!("asymptotic index must be >= -1, got {index}")));
        }
        if index > tables.order() as i32 {
            return Err(Error::IndexBeyondTables {
                index: index as usize,
                max: tables.order(),
            });
        }
        let d = geom.d_rational();
        let (a, b) = (geom.a(), geom.b());
        let (fa, fb) = (geom.warp().value(a), geom.warp().value(b));
        let compile = |p: &crate::diffpoly::DiffPoly| p.compile(&d);
        let mut pieces = Vec::new();
        for (k, mk) in mass.terms() {
            let kf = k as f64;
            let k2 = 2 * k as i32;
            match index {
                -1 => pieces.push(Piece {
                    coeff: mk / (2.0 * PI.sqrt()),
                    p: kf - 0.5,
                    alpha: kf - 0.5,
                    weight: vec![WeightPart::Interior {
                        poly: compile(&crate::diffpoly::DiffPoly::one()),
                        power: k2 - 1,
                    }],
                }),
                0 => {
                    let sign = if bc == BoundaryKind::Neumann { -1.0 } else { 1.0 };
                    pieces.push(Piece {
                        coeff: -0.25 * sign * mk,
                        p: kf,
                        alpha: kf,
                        weight: vec![
                            WeightPart::Endpoint {
                                value: 1.0,
                                f: fa,
                                power: k2,
                            },
                            WeightPart::Endpoint {
                                value: 1.0,
                                f: fb,
                                power: k2,
                            },
                        ],
                    });
                }
                i => {
                    let i = i as usize;
                    let half = i as f64 / 2.0;
                    let omega = if i.is_multiple_of(2) { tables.omega_row(i / 2) } else { Vec::new() };
                    for (j, fji) in tables.f_row(i).iter().enumerate() {
                        let power = k2 + (2 * j + i) as i32;
                        let mut weight = Vec::new();
                        if !fji.is_zero() {
                            weight.push(WeightPart::Interior {
                                poly: compile(fji),
                                power,
                            });
                        }
                        if let Some(om) = omega.get(j).filter(|p| !p.is_zero()) {
                            weight.push(WeightPart::Endpoint {
                                value: -geom.eval_at(om, a)?,
                                f: fa,
                                power,
                            });
                        }
                        if weight.is_empty() {
                            continue;
                        }
                        let shift = j as f64 + half;
                        pieces.push(Piece {
                            coeff: -mk / gamma(shift)?,
                            p: shift + kf,
                            alpha: kf + half,
                            weight,
                        });
                    }
                    if bc == BoundaryKind::Neumann {
                        for j in 0..=i {
                            let (qm, qp) = (tables.q.minus(j, i), tables.q.plus(j, i));
                            let power = k2 + (2 * j + i) as i32;
                            let mut weight = Vec::new();
                            if !qm.is_zero() {
                                weight.push(WeightPart::Endpoint {
                                    value: geom.eval_at(&qm, a)?,
                                    f: fa,
                                    power,
                                });
                            }
                            if !qp.is_zero() {
                                weight.push(WeightPart::Endpoint {
                                    value: geom.eval_at(&qp, b)?,
                                    f: fb,
                                    power,
                                });
                            }
                            if weight.is_empty() {
                                continue;
                            }
                            let shift = j as f64 + half;
                            pieces.push(Piece {
                                coeff: -mk / gamma(shift)?,
                                p: shift + kf,
                                alpha: kf + half,
                                weight,
                            });
                        }
                    }
                }
            }
        }
        Ok(AsymptoticTerm { index, bc, pieces })
    }

    pub fn index(&self) -> i32 {
        self.index
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    /// Arguments `s + alpha` at which `zeta_N` is consulted when `s = s0`.
    pub fn zeta_arguments(&self, s0: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().map(|p| s0 + p.alpha).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Laurent data at real `s0`: the value when regular, otherwise the
    /// residue and finite part of a simple pole.
    pub fn evaluate(&self, geom: &Geometry, s0: f64) -> Result<ResFp> {
        let mut out = ResFp::regular(0.0);
        for piece in &self.pieces {
            let v = piece.laurent(geom, s0)?;
            out.residue += v.residue;
            out.finite_part += v.finite_part;
        }
        Ok(out)
    }

    /// `d/ds A_i(s)` at `s = 0` in the massless case.
    pub fn derivative_at_zero(&self, geom: &Geometry) -> Result<f64> {
        self.pieces.iter().map(|p| p.derivative_at_zero(geom)).sum()
    }
}

/// Value (or residue and finite part) of `A_i(s)` at real `s`.
pub fn asymptotic_term(
    geom: &Geometry,
    tables: &WkbTables,
    i: i32,
    s: f64,
    bc: BoundaryKind,
    mass: MassExpansion,
) -> Result<ResFp> {
    AsymptoticTerm::new(geom, tables, i, bc, mass)?.evaluate(geom, s)
}

/// `A_i'(0)` for the massless problem.
pub fn asymptotic_derivative_at_0(geom: &Geometry, tables: &WkbTables, i: i32, bc: BoundaryKind) -> Result<f64> {
    AsymptoticTerm::new(geom, tables, i, bc, MassExpansion::MASSLESS)?.derivative_at_zero(geom)
}
