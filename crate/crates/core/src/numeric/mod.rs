// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Exact rationals, piecewise polynomials, quadrature and gamma.

mod gamma;
pub mod linalg;
mod piecewise;
mod polynomial;
mod quadrature;
pub mod rational;

pub use gamma::{beta_constant, log_gamma};
pub use piecewise::{integrate_monomial_weighted, integrate_real_power, PiecewisePolynomial};
pub use polynomial::Polynomial;
pub use quadrature::{adaptive_integrate, EVALUATION_BUDGET};
pub use rational::{format_rational, int, parse_rational, rat, to_f64, Rational};
