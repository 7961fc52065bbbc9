// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! One-variable test curves, their Legendre-dual rays, and speeds of rays
//! read off from spectral measures.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtration::s_m_p;
use crate::numeric::rational::pow;
use crate::numeric::{format_rational, int, to_f64, Rational};
use crate::okounkov::{moment_p, ConcaveTransform, SpectralMeasure};
use crate::toric::{concave_transform, section_filtration, volume_curve_of, ToricModel, ToricValuation};
use crate::volume_curve::s_p;

fn slope(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

/// Drops knots where the slope does not change.
fn canonical(knots: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(knots.len());
    for k in knots {
        while out.len() >= 2 && slope(&out[out.len() - 2], &out[out.len() - 1]) == slope(&out[out.len() - 1], &k) {
            out.pop();
        }
        out.push(k);
    }
    out
}

fn fmt_knot(k: &(Rational, Rational)) -> String {
    format!("({}, {})", format_rational(&k.0), format_rational(&k.1))
}

/// Concave, nonincreasing PL `ψ` on `[0, λ_max]` with `ψ(0) = 0`, and `−∞`
/// beyond `λ_max`. Knots are kept in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCurve1D {
    knots: Vec<(Rational, Rational)>,
}

impl TestCurve1D {
    pub fn new(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        let Some(first) = knots.first() else {
            return Err(Error::Argument("test curve needs at least one knot".into()));
        };
        if !first.0.is_zero() || !first.1.is_zero() {
            return Err(Error::invariant("TestCurve1D.origin", format!("first knot {}", fmt_knot(first))));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::Structure(format!("knots not increasing at {}", fmt_knot(&w[1]))));
        }
        let slopes: Vec<Rational> = knots.windows(2).map(|w| slope(&w[0], &w[1])).collect();
        if let Some(s) = slopes.first().filter(|s| s.is_positive()) {
            return Err(Error::invariant(
                "TestCurve1D.nonincreasing",
                format!("λ = 0 (slope {})", format_rational(s)),
            ));
        }
        if let Some(i) = (1..slopes.len()).find(|&i| slopes[i] > slopes[i - 1]) {
            return Err(Error::invariant(
                "TestCurve1D.concave",
                format!("λ = {}", format_rational(&knots[i].0)),
            ));
        }
        Ok(TestCurve1D { knots: canonical(knots) })
    }

    /// `ψ = 0` on `[0, c]`.
    pub fn shifted_trivial(c: Rational) -> Result<Self> {
        if c.is_zero() {
            return Self::new(vec![(Rational::zero(), Rational::zero())]);
        }
        Self::new(vec![(Rational::zero(), Rational::zero()), (c, Rational::zero())])
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn lambda_max(&self) -> &Rational {
        &self.knots.last().expect("nonempty").0
    }

    /// `ψ(λ)`, `None` for `−∞`.
    pub fn eval(&self, lambda: &Rational) -> Option<Rational> {
        if lambda.is_negative() || lambda > self.lambda_max() {
            return None;
        }
        if self.knots.len() == 1 {
            return Some(self.knots[0].1.clone());
        }
        let i = self.knots.partition_point(|k| k.0 <= *lambda).clamp(1, self.knots.len() - 1);
        let (a, b) = (&self.knots[i - 1], &self.knots[i]);
        Some(&a.1 + slope(a, b) * (lambda - &a.0))
    }
}

/// Convex, nondecreasing PL `φ` on `[0, ∞)` with `φ(0) = 0`; linear with
/// slope `final_slope` after the last knot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicRay1D {
    knots: Vec<(Rational, Rational)>,
    final_slope: Rational,
}

impl GeodesicRay1D {
    pub fn new(knots: Vec<(Rational, Rational)>, final_slope: Rational) -> Result<Self> {
        let Some(first) = knots.first() else {
            return Err(Error::Argument("ray needs at least one knot".into()));
        };
        if !first.0.is_zero() || !first.1.is_zero() {
            return Err(Error::invariant("GeodesicRay1D.origin", format!("first knot {}", fmt_knot(first))));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::Structure(format!("knots not increasing at {}", fmt_knot(&w[1]))));
        }
        let mut slopes: Vec<Rational> = knots.windows(2).map(|w| slope(&w[0], &w[1])).collect();
        slopes.push(final_slope.clone());
        if slopes[0].is_negative() {
            return Err(Error::invariant("GeodesicRay1D.nondecreasing", "t = 0".to_string()));
        }
        if let Some(i) = (1..slopes.len()).find(|&i| slopes[i] < slopes[i - 1]) {
            return Err(Error::invariant(
                "GeodesicRay1D.convex",
                format!("t = {}", format_rational(&knots[i].0)),
            ));
        }
        let mut knots = knots;
        // A far sentinel lets the canonical pass see the final slope.
        let last = knots.last().expect("nonempty").clone();
        let far = (&last.0 + int(1), &last.1 + &final_slope);
        knots.push(far);
        let mut knots = canonical(knots);
        knots.pop();
        Ok(GeodesicRay1D { knots, final_slope })
    }

    /// `φ(t) = Ct`.
    pub fn linear(c: Rational) -> Result<Self> {
        Self::new(vec![(Rational::zero(), Rational::zero())], c)
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn final_slope(&self) -> &Rational {
        &self.final_slope
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        if t.is_negative() {
            return Err(Error::Range(format!("t = {} < 0", format_rational(t))));
        }
        let i = self.knots.partition_point(|k| k.0 <= *t);
        let a = &self.knots[i - 1];
        let s = match self.knots.get(i) {
            Some(b) => slope(a, b),
            None => self.final_slope.clone(),
        };
        Ok(&a.1 + s * (t - &a.0))
    }

    /// `0 ≤ φ(t) ≤ T t` at every knot and on the final ray, exactly.
    pub fn check_growth(&self, t_max: &Rational) -> Result<()> {
        for k in &self.knots {
            if k.1.is_negative() || k.1 > t_max * &k.0 {
                return Err(Error::invariant("GeodesicRay1D.growth", format!("t = {}", format_rational(&k.0))));
            }
        }
        if self.final_slope > *t_max {
            return Err(Error::invariant(
                "GeodesicRay1D.growth",
                format!("final slope {} > {}", format_rational(&self.final_slope), format_rational(t_max)),
            ));
        }
        Ok(())
    }
}

/// `φ(t) = max_λ (ψ(λ) + tλ)`, the upper envelope of the lines `ψ_i + λ_i t`.
pub fn legendre(tc: &TestCurve1D) -> GeodesicRay1D {
    let k = tc.knots();
    let mut knots = vec![(Rational::zero(), Rational::zero())];
    for j in 0..k.len().saturating_sub(1) {
        // Active line switches from λ_j to λ_{j+1} at t = −slope_j.
        let t = -slope(&k[j], &k[j + 1]);
        if t.is_positive() {
            let phi = &k[j].1 + &k[j].0 * &t;
            knots.push((t, phi));
        }
    }
    GeodesicRay1D::new(knots, tc.lambda_max().clone()).expect("envelope of a test curve is a ray")
}

/// `ψ(λ) = inf_t (φ(t) − tλ)` on `[0, λ_max]`; `λ_max` must be the final
/// slope of the ray, beyond which the infimum is `−∞`.
pub fn inverse_legendre(gr: &GeodesicRay1D, lambda_max: &Rational) -> Result<TestCurve1D> {
    if lambda_max != gr.final_slope() {
        return Err(Error::Argument(format!(
            "λ_max = {} differs from the final slope {}",
            format_rational(lambda_max),
            format_rational(gr.final_slope())
        )));
    }
    let k = gr.knots();
    let mut slopes: Vec<Rational> = k.windows(2).map(|w| slope(&w[0], &w[1])).collect();
    slopes.push(gr.final_slope().clone());
    let mut knots = vec![(Rational::zero(), Rational::zero())];
    for (j, s) in slopes.iter().enumerate() {
        if s.is_positive() {
            knots.push((s.clone(), &k[j].1 - &k[j].0 * s));
        }
    }
    TestCurve1D::new(knots)
}

/// `(∫ x^p dμ)^{1/p}`.
pub fn dp_speed(mu: &SpectralMeasure, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p = {p} < 1")));
    }
    Ok(mu.moment_f64(p).powf(1.0 / p))
}

/// Speed of the ray of a concave transform: `moment_p^{1/p}`.
pub fn dp_speed_transform(ct: &ConcaveTransform, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("p = 0 < 1".into()));
    }
    Ok(to_f64(&moment_p(ct, p)?).powf(1.0 / p as f64))
}

/// One level of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub m: u32,
    /// `S_m^(p)^{1/p}` from the jumping numbers at level `m`.
    pub quantized: f64,
    pub continuous: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct MomentIdentityReport {
    pub p: u32,
    /// `S^(p)^{1/p}` from the volume curve.
    pub curve_speed: f64,
    /// `moment_p^{1/p}` from the concave transform on the polytope.
    pub transform_speed: f64,
    pub identity_gap: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Allowed gap at the largest level: `n τ / m_max`.
    pub gap_bound: f64,
    pub passes: bool,
}

impl MomentIdentityReport {
    /// CSV rows `m, quantized, continuous, gap`.
    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        use crate::invariants::fmt_float;
        self.rows
            .iter()
            .map(|r| [r.m.to_string(), fmt_float(r.quantized), fmt_float(r.continuous), fmt_float(r.gap)])
            .collect()
    }
}

/// Compares the ray speed computed on the polytope with `S^(p)^{1/p}` from
/// the volume curve, and tabulates the jumping-number approximations at
/// levels `1, 2, 4, …, ≤ m_max`.
pub fn verify_moment_identity(tm: &ToricModel, tv: &ToricValuation, p: u32, m_max: u32) -> Result<MomentIdentityReport> {
    if p == 0 || m_max == 0 {
        return Err(Error::Argument("p and m_max must be positive".into()));
    }
    let curve = volume_curve_of(tm, tv)?;
    let curve_speed = to_f64(&s_p(&curve, p)?).powf(1.0 / p as f64);
    let transform_speed = dp_speed_transform(&concave_transform(tm, tv)?, p)?;
    let levels: Vec<u32> = std::iter::successors(Some(1u32), |m| m.checked_mul(2))
        .take_while(|m| *m <= m_max)
        .collect();
    let rows = levels
        .into_par_iter()
        .map(|m| {
            let f = section_filtration(tm, tv, m)?;
            let quantized = to_f64(&s_m_p(&f, p)).powf(1.0 / p as f64);
            Ok(ConvergenceRow {
                m,
                quantized,
                continuous: curve_speed,
                gap: (quantized - curve_speed).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = rows.last().expect("m = 1 is always present");
    let gap_bound = tm.dim() as f64 * to_f64(curve.tau()) / last.m as f64;
    let identity_gap = (curve_speed - transform_speed).abs();
    let passes = identity_gap <= 1e-10 && last.gap <= gap_bound + 1e-12 && last.gap <= rows[0].gap + 1e-12;
    Ok(MomentIdentityReport {
        p,
        curve_speed,
        transform_speed,
        identity_gap,
        rows,
        gap_bound,
        passes,
    })
}

/// `((n+p)/n)^{1/p} · speed(p)` over a p-grid, with whether it is
/// nondecreasing. Proven for divisorial measures; for others (such as a
/// Dirac mass) it is only reported.
pub fn normalized_speed_scan(n: u32, ps: &[u32], speed: impl Fn(u32) -> Result<f64>) -> Result<(Vec<(u32, f64)>, bool)> {
    let values: Vec<(u32, f64)> = ps
        .iter()
        .map(|&p| {
            let factor = ((n + p) as f64 / n as f64).powf(1.0 / p as f64);
            Ok((p, factor * speed(p)?))
        })
        .collect::<Result<_>>()?;
    let monotone = values.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-12));
    Ok((values, monotone))
}

/// Exact form of the divisorial monotonicity at integer `p < q`:
/// `((n+p)/n)^q S^(p)^q ≤ ((n+q)/n)^p S^(q)^p`.
pub fn normalized_moment_step_exact(n: u32, p: u32, sp: &Rational, q: u32, sq: &Rational) -> bool {
    let nn = int(n as i64);
    let lhs = pow(&((&nn + int(p as i64)) / &nn), q) * pow(sp, q);
    let rhs = pow(&((&nn + int(q as i64)) / &nn), p) * pow(sq, p);
    lhs <= rhs
}
