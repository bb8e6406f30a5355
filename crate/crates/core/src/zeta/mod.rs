//! Analytic continuation of the spectral zeta function: asymptotic terms,
//! the numerical remainder `Z'(0)`, zero-mode sectors and the final
//! `zeta(0)`, `zeta'(0)` assemblies.

mod constants;
mod finite;
mod report;
mod terms;
mod zero_mode;

pub use constants::{subtraction_constants, subtraction_constants_at, SubtractionConstants, WkbTables};
pub use finite::{finite_part_zprime0, log_u_remainder, FinitePart, FinitePartOptions};
pub use terms::{asymptotic_derivative_at_0, asymptotic_term, AsymptoticTerm, MassExpansion};
pub use zero_mode::{zero_mode_contribution, zero_mode_prime_by_quadrature, ZeroModeContribution};
pub use report::{asymptotic_sum_limit_at_0, zeta_at_0, zeta_prime_at_0, TermValue, Tolerances, ZetaAtZero, ZetaOptions, ZetaReport};
