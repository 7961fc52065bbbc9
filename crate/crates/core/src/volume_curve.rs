// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Volume curves `x ↦ vol(L − xF)` and the one-dimensional invariants they
//! determine: `τ`, the moments `S^(p)`, the radial profile, `H(p)`, `K(s)`
//! and the non-Archimedean H-functional candidate.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rational::{factorial, max, pow};
use crate::numeric::{
    adaptive_integrate, beta_constant, format_rational, int, to_f64, PiecewisePolynomial, Polynomial, Rational,
};

/// Interior sample points per piece for the float concavity checks.
pub const CONCAVITY_GRID: usize = 64;
/// Relative tolerance of the float concavity checks.
pub const CONCAVITY_TOL: f64 = 1e-12;

/// `vol(L − xF)` on `[0, τ]` for an `n`-dimensional polarization.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeCurve {
    n: u32,
    volume: Rational,
    tau: Rational,
    /// `None` exactly when `τ = 0`.
    curve: Option<PiecewisePolynomial>,
}

impl VolumeCurve {
    /// Validates and wraps a curve on `[0, τ]`; `V` is read off as `curve(0)`.
    pub fn new(n: u32, curve: PiecewisePolynomial) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        if !curve.start().is_zero() {
            return Err(Error::Structure(format!(
                "volume curve must start at 0, starts at {}",
                format_rational(curve.start())
            )));
        }
        if curve.pieces().is_empty() {
            return Err(Error::Structure("use VolumeCurve::degenerate for τ = 0".into()));
        }
        let volume = curve.eval(&Rational::zero())?;
        let tau = curve.end().clone();
        let c = VolumeCurve {
            n,
            volume,
            tau,
            curve: Some(curve),
        };
        c.validate()?;
        Ok(c)
    }

    /// The trivial case `τ = 0`: all moments vanish.
    pub fn degenerate(n: u32, volume: Rational) -> Result<Self> {
        if n == 0 || !volume.is_positive() {
            return Err(Error::Argument("degenerate curve needs n > 0 and V > 0".into()));
        }
        Ok(VolumeCurve {
            n,
            volume,
            tau: Rational::zero(),
            curve: None,
        })
    }

    /// `V·(1 − x/τ)^n`, the cone curve (`ℙⁿ` with a hyperplane when `V = (n+1)^n`, `τ = n+1`).
    pub fn cone(n: u32, volume: Rational, tau: Rational) -> Result<Self> {
        if !tau.is_positive() {
            return Self::degenerate(n, volume);
        }
        let base = Polynomial::linear(Rational::one(), -Rational::one() / &tau).pow(n);
        Self::new(n, PiecewisePolynomial::single(Rational::zero(), tau, base.scale(&volume))?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn volume(&self) -> &Rational {
        &self.volume
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn curve(&self) -> Option<&PiecewisePolynomial> {
        self.curve.as_ref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.curve.is_none()
    }

    fn validate(&self) -> Result<()> {
        let curve = self.curve.as_ref().expect("validated curves are non-degenerate");
        let x0 = Rational::zero();
        if !self.volume.is_positive() {
            return Err(Error::invariant(
                "VolumeCurve.positive_volume",
                format!("x = 0: curve(0) = {}", format_rational(&self.volume)),
            ));
        }
        let end = curve.eval_left(&self.tau)?;
        if !end.is_zero() {
            return Err(Error::invariant(
                "VolumeCurve.vanishes_at_tau",
                format!("x = {}: curve(τ) = {}", format_rational(&self.tau), format_rational(&end)),
            ));
        }
        if !curve.is_continuous() {
            let bad = curve
                .breakpoints()
                .iter()
                .skip(1)
                .find(|x| curve.eval_left(x).ok() != curve.eval(x).ok())
                .unwrap_or(&x0);
            return Err(Error::invariant(
                "VolumeCurve.continuous",
                format!("x = {}", format_rational(bad)),
            ));
        }
        // Monotonicity: exact derivative sign at piece ends and on an interior grid.
        let deriv = curve.derivative();
        for (i, d) in deriv.pieces().iter().enumerate() {
            for x in sample_points(&curve.breakpoints()[i], &curve.breakpoints()[i + 1], CONCAVITY_GRID) {
                let slope = d.eval(&x);
                if slope.is_positive() {
                    return Err(Error::invariant(
                        "VolumeCurve.nonincreasing",
                        format!("x = {} (slope {})", format_rational(&x), format_rational(&slope)),
                    ));
                }
            }
        }
        let n = f64::from(self.n);
        check_concave(
            &float_grid(curve),
            |y| y.max(0.0).powf(1.0 / n),
            "VolumeCurve.root_concave",
        )
    }

    /// Pulls the curve back from JSON `{"n": .., "curve": {...}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: VolumeCurveRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(repr.n, repr.curve)
    }

    pub fn to_json(&self) -> String {
        match &self.curve {
            Some(curve) => serde_json::to_string(&VolumeCurveRepr {
                n: self.n,
                curve: curve.clone(),
            })
            .expect("serializable"),
            None => format!(
                r#"{{"n":{},"degenerate_volume":"{}"}}"#,
                self.n,
                format_rational(&self.volume)
            ),
        }
    }

    /// Whether the radial profile exists and is concave (for `n ≥ 2`) or the
    /// curve is linear (`n = 1`): the condition the barycenter bounds need.
    pub fn check_admissible(&self) -> Result<()> {
        if self.is_degenerate() {
            return Ok(());
        }
        radial_profile(self).map(|_| ())
    }
}

#[derive(Serialize, Deserialize)]
struct VolumeCurveRepr {
    n: u32,
    curve: PiecewisePolynomial,
}

fn sample_points(a: &Rational, b: &Rational, interior: usize) -> Vec<Rational> {
    let steps = int(interior as i64 + 1);
    (0..=interior + 1).map(|k| a + (b - a) * int(k as i64) / &steps).collect()
}

/// Grid points with the curve evaluated exactly, then rounded.
fn float_grid(f: &PiecewisePolynomial) -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    let steps = int(CONCAVITY_GRID as i64 + 1);
    for (w, piece) in f.breakpoints().windows(2).zip(f.pieces()) {
        let width = &w[1] - &w[0];
        for k in 0..=CONCAVITY_GRID {
            let x = &w[0] + &width * int(k as i64) / &steps;
            grid.push((to_f64(&x), to_f64(&piece.eval(&x))));
        }
    }
    let end = f.end();
    grid.push((to_f64(end), to_f64(&f.eval_left(end).unwrap_or_else(|_| Rational::zero()))));
    grid.dedup_by(|a, b| a.0 == b.0);
    grid
}

/// Midpoint concavity on consecutive grid triples.
fn check_concave(samples: &[(f64, f64)], h: impl Fn(f64) -> f64, property: &str) -> Result<()> {
    let grid: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let values: Vec<f64> = samples.iter().map(|s| h(s.1)).collect();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 1..grid.len().saturating_sub(1) {
        let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
        let t = (x1 - x0) / (x2 - x0);
        let chord = values[i - 1] + t * (values[i + 1] - values[i - 1]);
        if values[i] < chord - CONCAVITY_TOL * scale {
            return Err(Error::invariant(
                property,
                format!("x = {x1}: value {} below chord {}", values[i], chord),
            ));
        }
    }
    Ok(())
}

/// `f^(n−1) = −curve′/V`, the normalized slice measure density on `(0, τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    n: u32,
    fpow: PiecewisePolynomial,
}

impl RadialProfile {
    pub fn fpow(&self) -> &PiecewisePolynomial {
        &self.fpow
    }

    /// `f(x) = fpow(x)^(1/(n−1))`; for `n = 1` this is the constant 1.
    pub fn f(&self, x: f64) -> f64 {
        if self.n == 1 {
            return 1.0;
        }
        self.fpow.eval_f64(x).max(0.0).powf(1.0 / f64::from(self.n - 1))
    }

    pub fn total_mass(&self) -> Rational {
        self.fpow.integrate(self.fpow.start(), self.fpow.end()).expect("own domain")
    }
}

/// Radial profile of a non-degenerate curve.
pub fn radial_profile(c: &VolumeCurve) -> Result<RadialProfile> {
    let curve = c
        .curve()
        .ok_or_else(|| Error::Domain("radial profile undefined for τ = 0".into()))?;
    let fpow = curve.derivative().scale(&(-Rational::one() / c.volume()));
    for (i, piece) in fpow.pieces().iter().enumerate() {
        for x in sample_points(&fpow.breakpoints()[i], &fpow.breakpoints()[i + 1], CONCAVITY_GRID) {
            let v = piece.eval(&x);
            if v.is_negative() {
                return Err(Error::invariant(
                    "RadialProfile.nonnegative",
                    format!("x = {}: f^(n-1) = {}", format_rational(&x), format_rational(&v)),
                ));
            }
        }
    }
    let profile = RadialProfile { n: c.n(), fpow };
    let mass = profile.total_mass();
    if !mass.is_one() {
        return Err(Error::invariant(
            "RadialProfile.unit_mass",
            format!("∫ f^(n-1) = {}", format_rational(&mass)),
        ));
    }
    if c.n() == 1 {
        // f^0 ≡ 1 forces a linear curve.
        if let Some((i, _)) = profile.fpow.pieces().iter().enumerate().find(|(_, p)| p.degree().unwrap_or(0) > 0)
        {
            return Err(Error::invariant(
                "RadialProfile.linear_in_dimension_one",
                format!("x = {}", format_rational(&profile.fpow.breakpoints()[i])),
            ));
        }
        let values: Vec<&Rational> = profile.fpow.pieces().iter().filter_map(|p| p.coeffs().first()).collect();
        if values.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::invariant(
                "RadialProfile.linear_in_dimension_one",
                "slope changes in dimension one".to_string(),
            ));
        }
    } else {
        let root = 1.0 / f64::from(c.n - 1);
        check_concave(&float_grid(&profile.fpow), |y| y.max(0.0).powf(root), "RadialProfile.concave")?;
    }
    Ok(profile)
}

/// Exact `S^(p) = (p/V) ∫_0^τ x^(p−1) vol(x) dx`.
pub fn s_p(c: &VolumeCurve, p: u32) -> Result<Rational> {
    if p == 0 {
        return Err(Error::Domain("p must be >= 1".into()));
    }
    match c.curve() {
        None => Ok(Rational::zero()),
        Some(curve) => {
            let integral = curve.integrate_monomial_weighted(p, &Rational::zero(), c.tau())?;
            Ok(integral * int(i64::from(p)) / c.volume())
        }
    }
}

/// `(1/V) ∫ x^p d(−vol)`, the Stieltjes form of `S^(p)`.
pub fn s_p_stieltjes(c: &VolumeCurve, p: u32) -> Result<Rational> {
    match c.curve() {
        None => Ok(Rational::zero()),
        Some(curve) => {
            let density = curve.derivative().scale(&-Rational::one());
            let integral = density.integrate_monomial_weighted(p + 1, &Rational::zero(), c.tau())?;
            Ok(integral / c.volume())
        }
    }
}

/// `S^(p)` for real `p ≥ 1` by adaptive quadrature.
pub fn s_p_real(c: &VolumeCurve, p: f64, tol: f64) -> Result<f64> {
    match c.curve() {
        None => {
            if p >= 1.0 {
                Ok(0.0)
            } else {
                Err(Error::Domain(format!("p = {p} must be >= 1")))
            }
        }
        Some(curve) => {
            let v = to_f64(c.volume());
            let integral = curve.integrate_real_power(p, &Rational::zero(), c.tau(), tol * v / p)?;
            Ok(p * integral / v)
        }
    }
}

/// `S^(p)`: exact for integral `p`, quadrature otherwise.
pub fn s_p_f64(c: &VolumeCurve, p: f64) -> Result<f64> {
    if p.fract() == 0.0 && (1.0..=64.0).contains(&p) {
        Ok(to_f64(&s_p(c, p as u32)?))
    } else {
        s_p_real(c, p, 1e-14 * to_f64(c.tau()).max(1.0).powf(p))
    }
}

/// `(Γ(p+1)Γ(n+1)/Γ(p+n+1)·τ^p, n/(n+p)·τ^p)`.
pub fn barycenter_bounds(c: &VolumeCurve, p: f64) -> (f64, f64) {
    let n = c.n();
    let tp = to_f64(c.tau()).powf(p);
    (beta_constant(n, p) * tp, f64::from(n) / (f64::from(n) + p) * tp)
}

/// Exact barycenter bounds for integral `p`.
pub fn barycenter_bounds_exact(c: &VolumeCurve, p: u32) -> (Rational, Rational) {
    let n = c.n();
    let tp = pow(c.tau(), p);
    let lower = factorial(p) * factorial(n) / factorial(p + n) * &tp;
    let upper = int(i64::from(n)) / int(i64::from(n + p)) * &tp;
    (lower, upper)
}

/// `H(p) = ((n+p)/n · S^(p))^(1/p)`.
pub fn h_stat(c: &VolumeCurve, p: f64) -> Result<f64> {
    if c.is_degenerate() {
        return Err(Error::Domain("H(p) undefined for τ = 0".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p = {p} must be >= 1")));
    }
    let n = f64::from(c.n());
    Ok(((n + p) / n * s_p_f64(c, p)?).powf(1.0 / p))
}

/// `H(p)^p` exactly, for integral `p`.
pub fn h_stat_pow_exact(c: &VolumeCurve, p: u32) -> Result<Rational> {
    let n = c.n();
    Ok(int(i64::from(n + p)) / int(i64::from(n)) * s_p(c, p)?)
}

/// `K(s) = s ∫_0^τ x^(s−1) g^(n−1)(x) dx` with `g = f/x`, for `s > n − 1`.
///
/// With `g^(n−1) = fpow/x^(n−1)` the integrand is `x^(s−n)·fpow(x)`; each
/// monomial `c_k x^k` of `fpow` integrates in closed form to
/// `c_k (b^e − a^e)/e` with `e = s − n + k + 1 > 0`, which absorbs the
/// singular factor at `x = 0`.
pub fn k_stat(c: &VolumeCurve, s: f64) -> Result<f64> {
    Ok(k_stat_grid(c, &[s])?[0])
}

/// `K(s)` on several exponents, building the radial profile once.
pub fn k_stat_grid(c: &VolumeCurve, ss: &[f64]) -> Result<Vec<f64>> {
    let n = c.n();
    if let Some(&s) = ss.iter().find(|&&s| !(s > f64::from(n) - 1.0)) {
        return Err(Error::Domain(format!("K(s) needs s > n - 1 = {}, got {s}", n - 1)));
    }
    if c.is_degenerate() {
        return Err(Error::Domain("K(s) undefined for τ = 0".into()));
    }
    let tau = to_f64(c.tau());
    if n == 1 {
        return Ok(ss.iter().map(|&s| tau.powf(s)).collect());
    }
    let profile = radial_profile(c)?;
    let fpow = profile.fpow();
    let terms: Vec<(f64, f64, usize, f64)> = fpow
        .pieces()
        .iter()
        .enumerate()
        .flat_map(|(i, piece)| {
            let a = to_f64(&fpow.breakpoints()[i]);
            let b = to_f64(&fpow.breakpoints()[i + 1]);
            piece
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, coeff)| !coeff.is_zero())
                .map(move |(k, coeff)| (a, b, k, to_f64(coeff)))
        })
        .collect();
    Ok(ss
        .iter()
        .map(|&s| {
            let total: f64 = terms
                .iter()
                .map(|&(a, b, k, coeff)| {
                    let e = s - f64::from(n) + k as f64 + 1.0;
                    coeff * (b.powf(e) - a.powf(e)) / e
                })
                .sum();
            s * total
        })
        .collect())
}

/// `A + log(1 − (1/V) ∫_0^τ e^(−x) vol(x) dx)` for one divisor.
pub fn h_na_candidate(c: &VolumeCurve, log_discrepancy: f64, tol: f64) -> Result<f64> {
    if !(log_discrepancy >= 0.0) {
        return Err(Error::Domain("log discrepancy must be >= 0".into()));
    }
    let integral = match c.curve() {
        None => 0.0,
        Some(curve) => {
            let intervals: Vec<(f64, f64, usize)> = curve
                .breakpoints()
                .windows(2)
                .enumerate()
                .map(|(i, w)| (to_f64(&w[0]), to_f64(&w[1]), i))
                .collect();
            let pieces = curve.pieces();
            let v = to_f64(c.volume());
            adaptive_integrate(|i, x| (-x).exp() * pieces[i].eval_f64(x), &intervals, tol * v)? / v
        }
    };
    let inner = 1.0 - integral;
    if !(inner > 0.0) {
        return Err(Error::invariant(
            "HNA.log_argument_positive",
            format!("1 - (1/V)∫e^-x vol = {inner}"),
        ));
    }
    Ok(log_discrepancy + inner.ln())
}

/// `1 − Σ_{k=1}^{terms} (−1)^(k+1) S^(k)/k!`, exact: the alternating-series
/// form of the argument of the logarithm in [`h_na_candidate`].
pub fn h_na_series(c: &VolumeCurve, terms: u32) -> Result<Rational> {
    let mut acc = Rational::one();
    for k in 1..=terms {
        let term = s_p(c, k)? / factorial(k);
        if k % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}

/// `(Γ(n+p+1)/(Γ(n+1)Γ(p+1)) · S^(p))^(1/p)`, conjectured non-increasing.
pub fn beta_normalized_moment(c: &VolumeCurve, p: f64) -> Result<f64> {
    Ok((s_p_f64(c, p)? / beta_constant(c.n(), p)).powf(1.0 / p))
}

/// One row of the exploratory scan of [`beta_normalized_moment`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureScanRow {
    pub p: f64,
    pub value: f64,
    /// Whether the value did not increase from the previous grid point
    /// (beyond `1e-12` relative).
    pub nonincreasing_step: bool,
}

/// Scans the conjectured non-increase over a `p` grid; reports, never asserts.
pub fn conjecture_scan(c: &VolumeCurve, grid: &[f64]) -> Result<Vec<ConjectureScanRow>> {
    let mut rows: Vec<ConjectureScanRow> = Vec::with_capacity(grid.len());
    for &p in grid {
        let value = beta_normalized_moment(c, p)?;
        let nonincreasing_step = rows
            .last()
            .map_or(true, |prev| value <= prev.value * (1.0 + 1e-12));
        rows.push(ConjectureScanRow {
            p,
            value,
            nonincreasing_step,
        });
    }
    Ok(rows)
}

/// Builds `vol(x) = V ∫_x^τ fpow / ∫_0^τ fpow` from a nonnegative density.
pub fn curve_from_density(n: u32, volume: &Rational, density: &PiecewisePolynomial) -> Result<VolumeCurve> {
    if !density.start().is_zero() {
        return Err(Error::Structure("density must start at 0".into()));
    }
    let total = density.integrate(density.start(), density.end())?;
    if !total.is_positive() {
        return Err(Error::Argument("density has no mass".into()));
    }
    let scale = volume / &total;
    let bps = density.breakpoints();
    let mut pieces = vec![Polynomial::zero(); density.pieces().len()];
    let mut tail = Rational::zero();
    for i in (0..density.pieces().len()).rev() {
        let anti = density.pieces()[i].antiderivative();
        // tail + F(b) − F(x)
        let constant = &tail + anti.eval(&bps[i + 1]);
        pieces[i] = (&Polynomial::constant(constant) - &anti).scale(&scale);
        tail += density.pieces()[i].integrate(&bps[i], &bps[i + 1]);
    }
    VolumeCurve::new(n, PiecewisePolynomial::new(bps.to_vec(), pieces)?.simplify())
}

/// Concave piecewise-linear profile `f ≥ 0` given by its values at breakpoints.
pub fn curve_from_profile(n: u32, volume: &Rational, knots: &[(Rational, Rational)]) -> Result<VolumeCurve> {
    if knots.len() < 2 {
        return Err(Error::Argument("profile needs at least two knots".into()));
    }
    let bps: Vec<Rational> = knots.iter().map(|(x, _)| x.clone()).collect();
    let pieces = knots
        .windows(2)
        .map(|w| {
            let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            let f = Polynomial::linear(&w[0].1 - &slope * &w[0].0, slope);
            f.pow(n - 1)
        })
        .collect();
    curve_from_density(n, volume, &PiecewisePolynomial::new(bps, pieces)?)
}

/// Largest grid violation of a claimed nondecreasing sequence (0 when none).
pub fn max_decrease(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0f64, |m, d| m.max(d))
}

/// `max(τ, 1)`, used to scale absolute tolerances.
pub fn tau_scale(c: &VolumeCurve) -> f64 {
    to_f64(&max(c.tau(), &Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn p2() -> VolumeCurve {
        VolumeCurve::cone(2, int(9), int(3)).unwrap()
    }

    fn linear(tau: Rational) -> VolumeCurve {
        VolumeCurve::cone(1, int(1), tau).unwrap()
    }

    #[test]
    fn p2_moments() {
        let c = p2();
        assert_eq!(s_p(&c, 1).unwrap(), int(1));
        assert_eq!(s_p(&c, 2).unwrap(), rat(3, 2));
        assert_eq!(s_p_stieltjes(&c, 2).unwrap(), rat(3, 2));
        let degenerate = VolumeCurve::degenerate(2, int(9)).unwrap();
        assert_eq!(s_p(&degenerate, 3).unwrap(), int(0));
    }

    #[test]
    fn real_moments() {
        let c = linear(int(1));
        let v = s_p_real(&c, 2.5, 1e-13).unwrap();
        assert!((v - 1.0 / 3.5).abs() < 1e-12);
        let v2 = s_p_real(&c, 2.0, 1e-13).unwrap();
        assert!((v2 - to_f64(&s_p(&c, 2).unwrap())).abs() < 1e-12);
        let v3 = s_p_real(&p2(), 3.0, 1e-12).unwrap();
        assert!((v3 - 2.7).abs() < 1e-11);
    }

    #[test]
    fn barycenter_examples() {
        let (lo, hi) = barycenter_bounds_exact(&linear(int(2)), 3);
        assert_eq!(lo, hi);
        assert_eq!(lo, rat(8, 4));
        let (lo, hi) = barycenter_bounds_exact(&p2(), 1);
        assert_eq!((lo, hi), (int(1), int(2)));
        let (lo, hi) = barycenter_bounds(&VolumeCurve::cone(2, int(1), int(1)).unwrap(), 2.0);
        assert!((lo - 1.0 / 6.0).abs() < 1e-14 && (hi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn h_examples() {
        for p in [1.0, 1.7, 4.0, 9.5] {
            assert!((h_stat(&linear(int(1)), p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((h_stat(&p2(), 1.0).unwrap() - 1.5).abs() < 1e-14);
        assert!((h_stat(&p2(), 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        // On the cone curve H(p) = τ·(p+1)^(-1/p) in closed form.
        let h200 = h_stat(&p2(), 200.0).unwrap();
        assert!((h200 - 3.0 * 201f64.powf(-1.0 / 200.0)).abs() < 1e-12, "{h200}");
        let h400 = h_stat(&p2(), 400.0).unwrap();
        assert!((h400 - 3.0).abs() <= 0.02 * 3.0, "{h400}");
        assert!(h_stat(&VolumeCurve::degenerate(2, int(1)).unwrap(), 1.0).is_err());
    }

    #[test]
    fn k_identity_and_domain() {
        let c = p2();
        for p in [1.0, 2.0, 3.0] {
            let via_k = (k_stat(&c, 2.0 + p).unwrap() / k_stat(&c, 2.0).unwrap()).powf(1.0 / p);
            assert!((via_k - h_stat(&c, p).unwrap()).abs() < 1e-9);
        }
        assert!(matches!(k_stat(&c, 1.0), Err(Error::Domain(_))));
        let line = linear(rat(5, 2));
        assert!((k_stat(&line, 3.5).unwrap() - 2.5f64.powf(3.5)).abs() < 1e-12);
        let (a, b, d) = (k_stat(&c, 2.0).unwrap(), k_stat(&c, 2.5).unwrap(), k_stat(&c, 3.0).unwrap());
        assert!(a.ln() + d.ln() - 2.0 * b.ln() >= -1e-9);
    }

    #[test]
    fn h_na_examples() {
        let degenerate = VolumeCurve::degenerate(1, int(1)).unwrap();
        assert_eq!(h_na_candidate(&degenerate, 0.0, 1e-12).unwrap(), 0.0);
        let v = h_na_candidate(&linear(int(1)), 1.0, 1e-13).unwrap();
        assert!((v - (1.0 + (1.0 - (-1f64).exp()).ln())).abs() < 1e-12);
        assert!((v - 0.5413).abs() < 1e-4);
        for c in [linear(int(1)), p2()] {
            let series = to_f64(&h_na_series(&c, 40).unwrap());
            let quad = h_na_candidate(&c, 0.0, 1e-14).unwrap().exp();
            assert!((series - quad).abs() < 1e-10, "{series} vs {quad}");
        }
    }

    #[test]
    fn radial_profile_examples() {
        let prof = radial_profile(&p2()).unwrap();
        assert_eq!(prof.fpow().pieces()[0], Polynomial::linear(rat(2, 3), rat(-2, 9)));
        assert_eq!(prof.total_mass(), int(1));
        // n = 2: f = f^(n-1) itself.
        assert!((prof.f(1.0) - 4.0 / 9.0).abs() < 1e-15);
        let line = radial_profile(&linear(int(4))).unwrap();
        assert_eq!(line.fpow().pieces()[0], Polynomial::constant(rat(1, 4)));
    }

    #[test]
    fn rejects_increasing_segment() {
        let bad = PiecewisePolynomial::new(
            vec![int(0), int(1), int(2)],
            vec![Polynomial::linear(int(2), int(1)), Polynomial::linear(int(6), int(-3))],
        )
        .unwrap();
        match VolumeCurve::new(1, bad) {
            Err(Error::Invariant { property, witness }) => {
                assert_eq!(property, "VolumeCurve.nonincreasing");
                assert!(witness.starts_with("x = 0"), "{witness}");
            }
            other => panic!("expected invariant violation, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nonconcave_root() {
        // (1 - x)^4 in dimension 2 has a convex square root.
        let bad = PiecewisePolynomial::single(int(0), int(1), Polynomial::linear(int(1), int(-1)).pow(4)).unwrap();
        assert!(matches!(VolumeCurve::new(2, bad), Err(Error::Invariant { .. })));
    }

    #[test]
    fn density_construction() {
        // f(x) = x on [0, 2] in dimension 3: vol ∝ 8 − x^3.
        let c = curve_from_profile(3, &int(8), &[(int(0), int(0)), (int(2), int(2))]).unwrap();
        assert_eq!(c.curve().unwrap().pieces()[0], Polynomial::new(vec![int(8), int(0), int(0), int(-1)]));
        assert_eq!(radial_profile(&c).unwrap().total_mass(), int(1));
    }

    #[test]
    fn json_round_trip() {
        let c = p2();
        let back = VolumeCurve::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
