// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use super::quadrature::adaptive_integrate;
use super::rational::{format_rational, serde_rational, to_f64, Rational};
use crate::error::{Error, Result};

/// A polynomial on each interval `[breakpoints[i], breakpoints[i+1]]`.
///
/// A single breakpoint with no pieces is the degenerate function on a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Structure("piecewise polynomial needs a breakpoint".into()));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::Structure(format!(
                "{} breakpoints but {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Structure(format!(
                "breakpoints not strictly increasing at {}",
                format_rational(&w[1])
            )));
        }
        Ok(PiecewisePolynomial { breakpoints, pieces })
    }

    /// One polynomial on `[a, b]`.
    pub fn single(a: Rational, b: Rational, poly: Polynomial) -> Result<Self> {
        Self::new(vec![a, b], vec![poly])
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn start(&self) -> &Rational {
        &self.breakpoints[0]
    }

    pub fn end(&self) -> &Rational {
        self.breakpoints.last().unwrap()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.start() <= x && x <= self.end()
    }

    /// Index of the piece used to evaluate at `x`; interior breakpoints
    /// belong to the piece on their right.
    fn piece_index(&self, x: &Rational) -> Option<usize> {
        if !self.contains(x) || self.pieces.is_empty() {
            return None;
        }
        let idx = match self.breakpoints.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Some(idx.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        self.piece_index(x)
            .map(|i| self.pieces[i].eval(x))
            .ok_or_else(|| Error::Range(format!("{} outside domain", format_rational(x))))
    }

    /// Left limit at `x` (uses the piece ending at `x` when `x` is a breakpoint).
    pub fn eval_left(&self, x: &Rational) -> Result<Rational> {
        match self.breakpoints.binary_search(x) {
            Ok(i) if i > 0 => Ok(self.pieces[i - 1].eval(x)),
            _ => self.eval(x),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        if self.pieces.is_empty() {
            return 0.0;
        }
        let idx = self
            .breakpoints
            .partition_point(|b| to_f64(b) <= x)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        self.pieces[idx].eval_f64(x)
    }

    /// Whether the pieces agree at every interior breakpoint.
    pub fn is_continuous(&self) -> bool {
        self.pieces.windows(2).zip(&self.breakpoints[1..]).all(|(w, x)| w[0].eval(x) == w[1].eval(x))
    }

    pub fn derivative(&self) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Polynomial::derivative).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn map_pieces(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(f).collect(),
        }
    }

    /// Same function on a finer partition. `extra` points outside the domain
    /// are ignored.
    pub fn refine(&self, extra: &[Rational]) -> Self {
        let mut bps: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(extra.iter().filter(|x| self.contains(x)))
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        let pieces = bps
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / Rational::from_integer(2.into());
                self.pieces[self.piece_index(&mid).unwrap()].clone()
            })
            .collect();
        PiecewisePolynomial { breakpoints: bps, pieces }
    }

    /// Pointwise sum on a common domain.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.start() != other.start() || self.end() != other.end() {
            return Err(Error::Range("piecewise sum over different domains".into()));
        }
        let a = self.refine(&other.breakpoints);
        let b = other.refine(&self.breakpoints);
        Ok(PiecewisePolynomial {
            breakpoints: a.breakpoints,
            pieces: a.pieces.iter().zip(&b.pieces).map(|(p, q)| p + q).collect(),
        })
    }

    /// Merges adjacent pieces carrying the same polynomial.
    pub fn simplify(&self) -> Self {
        if self.pieces.is_empty() {
            return self.clone();
        }
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Polynomial> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if pieces.last() == Some(p) {
                *bps.last_mut().unwrap() = self.breakpoints[i + 1].clone();
            } else {
                pieces.push(p.clone());
                bps.push(self.breakpoints[i + 1].clone());
            }
        }
        PiecewisePolynomial { breakpoints: bps, pieces }
    }

    fn check_interval(&self, a: &Rational, b: &Rational) -> Result<()> {
        if a > b {
            return Err(Error::Range(format!(
                "integration bounds reversed: {} > {}",
                format_rational(a),
                format_rational(b)
            )));
        }
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::Range(format!(
                "[{}, {}] not inside [{}, {}]",
                format_rational(a),
                format_rational(b),
                format_rational(self.start()),
                format_rational(self.end())
            )));
        }
        Ok(())
    }

    /// Exact `∫_a^b x^(p-1) f(x) dx` for a positive integer `p`.
    pub fn integrate_monomial_weighted(&self, p: u32, a: &Rational, b: &Rational) -> Result<Rational> {
        if p == 0 {
            return Err(Error::Domain("p must be a positive integer".into()));
        }
        self.check_interval(a, b)?;
        let mut total = Rational::zero();
        for (i, poly) in self.pieces.iter().enumerate() {
            let lo = crate::numeric::rational::max(&self.breakpoints[i], a);
            let hi = crate::numeric::rational::min(&self.breakpoints[i + 1], b);
            if lo >= hi {
                continue;
            }
            total += poly.shift_up(p as usize - 1).integrate(&lo, &hi);
        }
        Ok(total)
    }

    /// Exact `∫_a^b f(x) dx`.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        self.integrate_monomial_weighted(1, a, b)
    }

    /// Adaptive-quadrature estimate of `∫_a^b x^(p-1) f(x) dx` for real `p ≥ 1`.
    pub fn integrate_real_power(&self, p: f64, a: &Rational, b: &Rational, tol: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p = {p} must be a finite real >= 1")));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance {tol} must be positive")));
        }
        self.check_interval(a, b)?;
        let mut cuts: Vec<f64> = vec![to_f64(a)];
        cuts.extend(
            self.breakpoints
                .iter()
                .filter(|x| *x > a && *x < b)
                .map(to_f64),
        );
        cuts.push(to_f64(b));
        if cuts.len() == 2 && cuts[0] == cuts[1] {
            return Ok(0.0);
        }
        // Evaluate each interval with its own piece so breakpoints never
        // pick up the neighbouring polynomial.
        let intervals: Vec<(f64, f64, usize)> = cuts
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let idx = self
                    .breakpoints
                    .partition_point(|x| to_f64(x) <= mid)
                    .saturating_sub(1)
                    .min(self.pieces.len().saturating_sub(1));
                (w[0], w[1], idx)
            })
            .collect();
        let pm1 = p - 1.0;
        let pieces = &self.pieces;
        adaptive_integrate(
            |idx, x| {
                let w = if pm1 == 0.0 { 1.0 } else { x.powf(pm1) };
                w * pieces[idx].eval_f64(x)
            },
            &intervals,
            tol,
        )
    }
}

/// Exact `∫_a^b x^(p-1) f(x) dx`.
pub fn integrate_monomial_weighted(f: &PiecewisePolynomial, p: u32, a: &Rational, b: &Rational) -> Result<Rational> {
    f.integrate_monomial_weighted(p, a, b)
}

/// Adaptive quadrature of `∫_a^b x^(p-1) f(x) dx`, absolute error ≤ `tol`.
pub fn integrate_real_power(f: &PiecewisePolynomial, p: f64, a: &Rational, b: &Rational, tol: f64) -> Result<f64> {
    f.integrate_real_power(p, a, b, tol)
}

/// Wire form: `{"breakpoints": ["a/b", ...], "pieces": [["c0", "c1", ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct PiecewiseRepr {
    #[serde(with = "serde_rational::vec")]
    breakpoints: Vec<Rational>,
    #[serde(with = "serde_rational::vec2")]
    pieces: Vec<Vec<Rational>>,
}

impl Serialize for PiecewisePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiecewiseRepr {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.coeffs().to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewisePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PiecewiseRepr::deserialize(d)?;
        PiecewisePolynomial::new(repr.breakpoints, repr.pieces.into_iter().map(Polynomial::new).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl PiecewisePolynomial {
    /// The constant 1 on `[a, b]`.
    pub fn one(a: Rational, b: Rational) -> Result<Self> {
        Self::single(a, b, Polynomial::constant(Rational::one()))
    }
}
