//! Exact differential-polynomial algebra.
//!
//! A [`DiffPoly`] is a finite sum of monomials `f^a * f'^b * f''^c ...` with
//! coefficients that are rational polynomials in the base dimension `d`.
//! [`YPoly`] and [`NuSeries`] layer truncated series on top, which is where the
//! cumulant expansions live.

mod dimpoly;
mod poly;
mod series;

pub use dimpoly::{rat, rat_int, DimPoly, Rational};
pub use poly::{log_derivative_times_d, CompiledPoly, DiffMonomial, DiffPoly};
pub use series::{series_log, NuSeries, YPoly};

/// Product of two differential polynomials.
pub fn dp_mul(p: &DiffPoly, q: &DiffPoly) -> DiffPoly {
    p * q
}

/// Formal r-derivative.
pub fn dp_derivative(p: &DiffPoly) -> DiffPoly {
    p.derivative()
}

/// Evaluates `p` at a jet for a given exact dimension.
pub fn dp_evaluate(
    p: &DiffPoly,
    jet: &crate::geometry::Jet,
    d_value: &Rational,
) -> crate::error::Result<f64> {
    p.evaluate(jet, d_value)
}
